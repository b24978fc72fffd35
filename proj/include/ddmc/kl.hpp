#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddmc/grid.hpp"
#include "ddmc/quadrature.hpp"

namespace ddmc {

/// Separable exponential covariance sigma^2 exp(-|x1-y1|/L - |x2-y2|/L)
/// around a mean field a0.
struct CovarianceSpec {
  double sigma = 0.25;
  double corr_len = 1.0;
  std::function<double(double, double)> mean = [](double, double) { return 1.0; };

  static CovarianceSpec with_constant_mean(double sigma, double corr_len, double a0);
  bool compatible_with(const CovarianceSpec& other) const {
    return sigma == other.sigma && corr_len == other.corr_len;
  }
};

/// One eigenpair of the 1D kernel exp(-|s-t|/L) on [0, len].
/// Eigenfunctions are cos/sin about the interval midpoint.
struct Eigenpair1D {
  double lambda = 0.0;
  double omega = 0.0;
  bool odd = false;
  double half_len = 0.0;
  double inv_norm = 0.0;

  double eval(double s) const {
    const double t = s - half_len;
    return (odd ? std::sin(omega * t) : std::cos(omega * t)) * inv_norm;
  }
};

/// The `count` largest eigenpairs of exp(-|s-t|/L) on [0,len], descending.
/// Roots of the transcendental eigenvalue equations are bisected inside the
/// non-overlapping brackets ((r-1)pi/len, r*pi/len).
std::vector<Eigenpair1D> eigenpairs_1d(double corr_len, double len, int count);

class KLBasis;

/// Coefficient vector against a basis; evaluable to field values.
struct FieldSample {
  const KLBasis* basis = nullptr;
  Eigen::VectorXd xi;
};

/// Truncated 2D KL basis on a rectangle: tensor products of 1D eigenpairs,
/// sorted by descending eigenvalue. Immutable after construction.
class KLBasis {
public:
  static constexpr int kDefaultMaxTerms = 2048;

  /// Builds the minimal basis capturing more than `delta_kl` of the total
  /// variance |D| sigma^2. `grid` is the working grid of the owning domain;
  /// its cells carry the quadrature used for all inner products, and modes
  /// are renormalized against that rule.
  static KLBasis build(const CovarianceSpec& spec, const Rect& domain, double delta_kl,
                       const Grid2D& grid, int max_terms = kDefaultMaxTerms);

  int dim() const { return static_cast<int>(eigvals_.size()); }
  double captured() const { return captured_; }
  const Eigen::VectorXd& eigenvalues() const { return eigvals_; }
  double eigenvalue(int r) const { return eigvals_[r]; }
  const Rect& domain() const { return domain_; }
  const CovarianceSpec& spec() const { return spec_; }
  const Grid2D& grid() const { return grid_; }
  const GridQuadrature& quadrature() const { return *quad_; }
  double mean(double x, double y) const { return spec_.mean(x, y); }

  /// 2D eigenfunction r at a point (no domain check).
  double eigenfunction(int r, double x, double y) const;

  /// (#points x d) matrix of eigenfunction values. Throws PointOutsideDomain
  /// if a point lies outside the closed domain (tolerance 1e-12 of extent).
  Eigen::MatrixXd modes_at(const Eigen::MatrixX2d& points) const;
  /// Mode values at the working grid nodes, cached on first use elsewhere.
  Eigen::MatrixXd modes_on_nodes(const Grid2D& grid) const;

  /// a0(x) + sum_r sqrt(lambda_r) psi_r(x) xi_r at each point.
  Eigen::VectorXd evaluate(const FieldSample& sample, const Eigen::MatrixX2d& points) const;

  /// Gram matrix of the modes under the working quadrature rule (test hook).
  Eigen::MatrixXd quadrature_gram() const;

  /// JSON text summary: {domain, L, sigma, d, eigvals, captured}.
  std::string summary_json() const;

  /// 1D mode index pair (ix, iy) of 2D mode r and the per-axis eigenpairs.
  std::pair<int, int> mode_pair(int r) const { return pairs_[r]; }
  const std::vector<Eigenpair1D>& axis_modes_x() const { return modes_x_; }
  const std::vector<Eigenpair1D>& axis_modes_y() const { return modes_y_; }
  /// Post-tensorization renormalization factor of mode r.
  double mode_scale(int r) const { return scale_[r]; }

private:
  KLBasis(const CovarianceSpec& spec, const Rect& domain, const Grid2D& grid);

  CovarianceSpec spec_;
  Rect domain_;
  Grid2D grid_;
  std::shared_ptr<const GridQuadrature> quad_;
  Eigen::VectorXd eigvals_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<Eigenpair1D> modes_x_, modes_y_;
  std::vector<double> scale_;
  double captured_ = 0.0;
};

/// Projects a field onto the local basis: xi_r = <field - a0, psi_r> / sqrt(lambda_r),
/// integrated with the basis's working quadrature. The field callable must be
/// evaluable on the basis domain.
Eigen::VectorXd extract_local_coeffs(const std::function<double(double, double)>& field,
                                     const KLBasis& local_basis);

/// Same projection for a field given as a FieldSample on some other basis.
Eigen::VectorXd extract_local_coeffs(const FieldSample& field, const KLBasis& local_basis);

}  // namespace ddmc
