#pragma once

#include <vector>

#include <Eigen/Core>

#include "ddmc/grid.hpp"

namespace ddmc {

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Composite per-cell Gauss-Legendre rule along one axis of a uniform grid.
struct AxisQuadrature {
  std::vector<double> points;
  std::vector<double> weights;

  AxisQuadrature() = default;
  /// `lo`..`hi` split into `cells` equal cells, `order` Gauss points per cell.
  AxisQuadrature(double lo, double hi, int cells, int order);

  int size() const { return static_cast<int>(points.size()); }
};

/// Tensor-product quadrature over a grid's cells. Integrals of separable
/// integrands reduce to per-axis sums; `integrate` handles the general case.
class GridQuadrature {
public:
  /// Default order is high enough that inner products of the covariance
  /// eigenfunctions used in this project are exact to ~1e-12.
  static constexpr int kDefaultOrder = 8;

  explicit GridQuadrature(const Grid2D& grid, int order = kDefaultOrder);

  const AxisQuadrature& x() const { return qx_; }
  const AxisQuadrature& y() const { return qy_; }
  const Rect& domain() const { return domain_; }

  /// All 2D quadrature points, x fastest, as (nx*ny x 2).
  Eigen::MatrixX2d points() const;
  /// Matching weights, same ordering.
  Eigen::VectorXd weights() const;

  template <class F>
  double integrate(F&& f) const {
    double total = 0.0;
    for (std::size_t j = 0; j < qy_.points.size(); ++j) {
      double row = 0.0;
      for (std::size_t i = 0; i < qx_.points.size(); ++i) {
        row += qx_.weights[i] * f(qx_.points[i], qy_.points[j]);
      }
      total += qy_.weights[j] * row;
    }
    return total;
  }

private:
  Rect domain_;
  AxisQuadrature qx_, qy_;
};

}  // namespace ddmc
