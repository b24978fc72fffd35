#include "ddmc/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddmc/errors.hpp"

namespace ddmc {

Grid2D::Grid2D(Rect domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) {
    throw ConfigError("grid needs at least 2 nodes per axis");
  }
  if (domain.width() <= 0.0 || domain.height() <= 0.0) {
    throw ConfigError("grid domain must have positive extent");
  }
  hx_ = domain.width() / (nx - 1);
  hy_ = domain.height() / (ny - 1);
}

int Grid2D::nearest_ix(double x, double* off) const {
  int ix = static_cast<int>(std::lround((x - domain_.x0) / hx_));
  ix = std::max(0, std::min(nx_ - 1, ix));
  if (off) *off = std::abs(x - x_of(ix));
  return ix;
}

int Grid2D::nearest_iy(double y, double* off) const {
  int iy = static_cast<int>(std::lround((y - domain_.y0) / hy_));
  iy = std::max(0, std::min(ny_ - 1, iy));
  if (off) *off = std::abs(y - y_of(iy));
  return iy;
}

Eigen::MatrixX2d Grid2D::node_coords() const {
  Eigen::MatrixX2d out(num_nodes(), 2);
  for (int id = 0; id < num_nodes(); ++id) {
    const Point2 p = node_coord(id);
    out(id, 0) = p.x;
    out(id, 1) = p.y;
  }
  return out;
}

void write_field_csv(std::ostream& os, const Grid2D& grid,
                     const Eigen::VectorXd& values) {
  if (values.size() != grid.num_nodes()) {
    throw LengthMismatch("field length does not match grid node count");
  }
  os << "x,y,value\n";
  char buf[96];
  for (int id = 0; id < grid.num_nodes(); ++id) {
    const Point2 p = grid.node_coord(id);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x, p.y, values[id]);
    os << buf;
  }
}

void write_field_csv(const std::string& path, const Grid2D& grid,
                     const Eigen::VectorXd& values) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_field_csv(os, grid, values);
}

Eigen::VectorXd read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MissingArtifact(path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<double> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto last = line.rfind(',');
    if (last == std::string::npos) throw Error("malformed field CSV row: " + line);
    vals.push_back(std::stod(line.substr(last + 1)));
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace ddmc
