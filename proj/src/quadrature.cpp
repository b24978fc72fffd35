#include "ddmc/quadrature.hpp"

#include <cmath>

#include "ddmc/errors.hpp"

namespace ddmc {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ConfigError("gauss_legendre: order must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  // Newton iteration from Chebyshev initial guesses; symmetric, so only half.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

AxisQuadrature::AxisQuadrature(double lo, double hi, int cells, int order) {
  std::vector<double> gn, gw;
  gauss_legendre(order, gn, gw);
  const double h = (hi - lo) / cells;
  points.reserve(static_cast<std::size_t>(cells) * order);
  weights.reserve(static_cast<std::size_t>(cells) * order);
  for (int c = 0; c < cells; ++c) {
    const double mid = lo + (c + 0.5) * h;
    for (int g = 0; g < order; ++g) {
      points.push_back(mid + 0.5 * h * gn[g]);
      weights.push_back(0.5 * h * gw[g]);
    }
  }
}

GridQuadrature::GridQuadrature(const Grid2D& grid, int order)
    : domain_(grid.domain()),
      qx_(grid.domain().x0, grid.domain().x1, grid.nx() - 1, order),
      qy_(grid.domain().y0, grid.domain().y1, grid.ny() - 1, order) {}

Eigen::MatrixX2d GridQuadrature::points() const {
  const int nx = qx_.size(), ny = qy_.size();
  Eigen::MatrixX2d out(static_cast<Eigen::Index>(nx) * ny, 2);
  Eigen::Index row = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i, ++row) {
      out(row, 0) = qx_.points[i];
      out(row, 1) = qy_.points[j];
    }
  }
  return out;
}

Eigen::VectorXd GridQuadrature::weights() const {
  const int nx = qx_.size(), ny = qy_.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(nx) * ny);
  Eigen::Index row = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i, ++row) {
      out[row] = qx_.weights[i] * qy_.weights[j];
    }
  }
  return out;
}

}  // namespace ddmc
