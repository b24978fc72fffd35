#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ddmc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(double x, double y, double tol = 0.0) const {
    return x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol;
  }
  bool operator==(const Rect&) const = default;
};

/// Uniform tensor-product grid on a rectangle.
///
/// Node ordering is row-major with x fastest: node id = iy * nx + ix, so a
/// nodal vector laid out by id walks along the x axis first. All file
/// exports and nodal fields in this library follow this ordering.
class Grid2D {
public:
  Grid2D(Rect domain, int nx, int ny);

  const Rect& domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_nodes() const { return nx_ * ny_; }
  int num_cells() const { return (nx_ - 1) * (ny_ - 1); }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  double x_of(int ix) const { return domain_.x0 + ix * hx_; }
  double y_of(int iy) const { return domain_.y0 + iy * hy_; }

  int node_id(int ix, int iy) const { return iy * nx_ + ix; }
  Point2 node_coord(int id) const {
    return {x_of(id % nx_), y_of(id / nx_)};
  }

  /// Nearest grid index along x/y; `off` receives the distance to that line.
  int nearest_ix(double x, double* off = nullptr) const;
  int nearest_iy(double y, double* off = nullptr) const;

  /// All node coordinates as an (num_nodes x 2) matrix in node-id order.
  Eigen::MatrixX2d node_coords() const;

private:
  Rect domain_;
  int nx_, ny_;
  double hx_, hy_;
};

/// Writes a nodal field as CSV with header `x,y,value`, rows in node-id order.
void write_field_csv(std::ostream& os, const Grid2D& grid,
                     const Eigen::VectorXd& values);
void write_field_csv(const std::string& path, const Grid2D& grid,
                     const Eigen::VectorXd& values);

/// Reads back a nodal field written by write_field_csv; checks row count.
Eigen::VectorXd read_field_csv(const std::string& path);

}  // namespace ddmc
