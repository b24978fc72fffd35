#pragma once

#include <vector>

#include <Eigen/Core>

#include "ddmc/fem.hpp"
#include "ddmc/grid.hpp"
#include "ddmc/kl.hpp"

namespace ddmc {

struct Interface {
  int i = 0, j = 0;  // subdomain pair, i < j
  EdgeSegment segment;
};

/// Non-overlapping axis-aligned partition of a rectangle whose subdomain
/// closures cover the domain. Interfaces are the shared full segments.
class Partition {
public:
  Partition(Rect domain, std::vector<Rect> subdomains);

  /// M vertical strips; widths default to equal.
  static Partition strips_x(const Rect& domain, int m);
  static Partition strips_x(const Rect& domain, const std::vector<double>& widths);

  const Rect& domain() const { return domain_; }
  int size() const { return static_cast<int>(subdomains_.size()); }
  const std::vector<Rect>& subdomains() const { return subdomains_; }
  const std::vector<Interface>& interfaces() const { return interfaces_; }

  /// Lowest-index subdomain whose closure contains the point (-1 if none).
  int owner_of(double x, double y, double tol = 1e-12) const;
  /// All subdomains whose closure contains the point.
  std::vector<int> all_owners(double x, double y, double tol = 1e-12) const;

private:
  Rect domain_;
  std::vector<Rect> subdomains_;
  std::vector<Interface> interfaces_;
};

/// Cached inner products <psi~_r^(i), psi_t> between zero-extended local modes
/// and global modes, plus the sqrt-eigenvalue-scaled blocks used to assemble
/// global coefficients. Built once per (partition, bases) and reused for all
/// samples.
class CouplingMatrix {
public:
  static CouplingMatrix build(const Partition& partition, const KLBasis& global_basis,
                              const std::vector<KLBasis>& local_bases);

  int num_subdomains() const { return static_cast<int>(blocks_.size()); }
  int global_dim() const { return global_dim_; }
  /// d x d^(i) block of raw inner products.
  const Eigen::MatrixXd& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  /// d x d^(i) map with eigenvalue scalings folded in:
  /// xi_hat = sum_i assembly_block(i) * xi^(i).
  const Eigen::MatrixXd& assembly_block(int i) const {
    return assembly_[static_cast<std::size_t>(i)];
  }

private:
  int global_dim_ = 0;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::MatrixXd> assembly_;
};

/// Global coefficients of the assembled field for one row of local samples.
Eigen::VectorXd assemble_coeffs(const CouplingMatrix& coupling,
                                const std::vector<Eigen::VectorXd>& local_row);

struct StitchedField {
  Eigen::VectorXd values;             // nodal, on the evaluation grid
  std::vector<double> interface_jump; // max |a_i - a_j| per interface (diagnostic)
};

/// Nodal evaluation of the stitched field: each node takes the value of the
/// lowest-index subdomain containing it; the discarded-side mismatch on
/// interface nodes is recorded as a jump diagnostic.
StitchedField stitch_nodal(const Partition& partition,
                           const std::vector<KLBasis>& local_bases,
                           const std::vector<Eigen::VectorXd>& local_row,
                           const Grid2D& grid);

struct FieldMoments {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // population (1/N) variance
};

/// Pointwise mean/variance over field samples (rows = samples).
FieldMoments posterior_moments(const Eigen::MatrixXd& field_samples);

}  // namespace ddmc
