#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "ddmc/grid.hpp"

namespace ddmc {

enum class EdgeSide { Left, Right, Bottom, Top };

/// One boundary-edge condition. Neumann data must be homogeneous; nodal
/// Dirichlet values are indexed along the edge (by iy for vertical edges,
/// ix for horizontal ones).
class EdgeCondition {
public:
  static EdgeCondition dirichlet(double value);
  static EdgeCondition dirichlet(std::vector<double> nodal_values);
  static EdgeCondition dirichlet(std::function<double(double, double)> fn);
  static EdgeCondition neumann(double flux = 0.0);

  bool is_dirichlet() const { return !std::holds_alternative<Neumann>(data_); }
  double value_at(int k, double x, double y) const;

private:
  struct Neumann {};
  using Data = std::variant<double, std::vector<double>,
                            std::function<double(double, double)>, Neumann>;
  explicit EdgeCondition(Data d) : data_(std::move(d)) {}
  Data data_;
};

struct BoundarySpec {
  EdgeCondition left = EdgeCondition::dirichlet(0.0);
  EdgeCondition right = EdgeCondition::dirichlet(0.0);
  EdgeCondition bottom = EdgeCondition::neumann();
  EdgeCondition top = EdgeCondition::neumann();

  const EdgeCondition& edge(EdgeSide s) const;
  bool any_dirichlet() const;
};

/// Scalar source term; default is the Gaussian bump amp*exp(-|x-c|^2).
class SourceField {
public:
  SourceField() : SourceField(gaussian_bump({1.5, 0.5}, 3.0)) {}
  explicit SourceField(std::function<double(double, double)> fn) : fn_(std::move(fn)) {}
  static SourceField gaussian_bump(Point2 center, double amplitude);
  static SourceField zero() { return SourceField([](double, double) { return 0.0; }); }
  double operator()(double x, double y) const { return fn_(x, y); }

private:
  std::function<double(double, double)> fn_;
};

/// Permeability input: a callable a(x,y) or nodal values interpolated
/// bilinearly within cells.
class Permeability {
public:
  Permeability(std::function<double(double, double)> fn) : data_(std::move(fn)) {}
  Permeability(Eigen::VectorXd nodal) : data_(std::move(nodal)) {}

  /// Values at the solver's quadrature points.
  Eigen::VectorXd at_gauss_points(const Grid2D& grid, const Eigen::MatrixX2d& pts) const;

private:
  std::variant<std::function<double(double, double)>, Eigen::VectorXd> data_;
};

struct FemSolution {
  Eigen::VectorXd u;
  Grid2D grid;
  int element_count = 0;
  double solve_seconds = 0.0;
};

/// Bilinear FEM solver for -div(a grad u) = f with fixed grid, boundary
/// conditions and source. The sparsity pattern, scatter map, load vector and
/// constraint data are computed once; each solve() only refills matrix values,
/// factorizes and back-substitutes, so repeated solves with varying
/// permeability (the MCMC loop) stay cheap.
///
/// A solver instance owns mutable factorization workspace: share solvers
/// across threads only for distinct instances.
class DiffusionSolver {
public:
  DiffusionSolver(const Grid2D& grid, BoundarySpec bc, const SourceField& src);

  const Grid2D& grid() const { return grid_; }
  /// 2x2 Gauss points of every cell, element-major (4 consecutive rows per cell).
  const Eigen::MatrixX2d& gauss_points() const { return gauss_pts_; }

  /// Solves with permeability sampled at gauss_points(), in that order.
  /// Throws NonPositivePermeability / SingularSystem.
  FemSolution solve(const Eigen::VectorXd& perm_at_gauss);
  FemSolution solve(const Permeability& perm);

private:
  Grid2D grid_;
  BoundarySpec bc_;
  Eigen::MatrixX2d gauss_pts_;
  Eigen::VectorXd load_;                  // source load vector per node
  std::vector<int> free_index_;           // node -> free slot or -1
  std::vector<int> free_nodes_;
  Eigen::VectorXd dirichlet_values_;      // per node, 0 where free
  double elem_matrices_[4][4][4];         // per gauss point 4x4 blocks
  Eigen::SparseMatrix<double> pattern_;   // free x free
  std::vector<int> slot_;                 // (cell*16 + a*4 + b) -> nnz slot or -1
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
  bool analyzed_ = false;
};

/// One-shot assemble-and-solve per the module contract.
FemSolution assemble_and_solve(const Grid2D& grid, const Permeability& perm,
                               const BoundarySpec& bc, const SourceField& src);

/// Solution values at sensor locations (each must coincide with a grid node).
Eigen::VectorXd observe(const FemSolution& sol, const std::vector<Point2>& sensors);

/// Axis-aligned segment on a grid line.
struct EdgeSegment {
  bool vertical = true;
  double fixed = 0.0;  // x for vertical, y for horizontal
  double lo = 0.0, hi = 1.0;

  double length() const { return hi - lo; }
  Point2 point_at(double s) const {
    return vertical ? Point2{fixed, lo + s} : Point2{lo + s, fixed};
  }
  Point2 midpoint() const { return point_at(0.5 * length()); }
};

/// Trace of the solution on a grid-aligned segment: (coordinate, value) pairs
/// at the grid nodes on the segment, ordered by arclength.
std::vector<std::pair<double, double>> restrict_solution(const FemSolution& sol,
                                                         const EdgeSegment& edge);

}  // namespace ddmc
