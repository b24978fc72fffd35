#include "ddmc/field_model.hpp"

#include <algorithm>
#include <cmath>

#include "ddmc/errors.hpp"
#include "ddmc/quadrature.hpp"

namespace ddmc {

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

}  // namespace

Partition::Partition(Rect domain, std::vector<Rect> subdomains)
    : domain_(domain), subdomains_(std::move(subdomains)) {
  if (subdomains_.empty()) throw ConfigError("partition needs at least one subdomain");
  double area = 0.0;
  for (const Rect& r : subdomains_) {
    if (r.width() <= 0.0 || r.height() <= 0.0) throw ConfigError("degenerate subdomain");
    if (r.x0 < domain.x0 - 1e-12 || r.x1 > domain.x1 + 1e-12 || r.y0 < domain.y0 - 1e-12 ||
        r.y1 > domain.y1 + 1e-12) {
      throw ConfigError("subdomain outside the global domain");
    }
    area += r.area();
  }
  // interior disjointness + covering, for the axis-aligned case
  if (!close(area, domain.area(), 1e-9 * domain.area())) {
    throw ConfigError("subdomains do not tile the global domain");
  }
  for (std::size_t i = 0; i < subdomains_.size(); ++i) {
    for (std::size_t j = i + 1; j < subdomains_.size(); ++j) {
      const Rect& a = subdomains_[i];
      const Rect& b = subdomains_[j];
      const double ox = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
      const double oy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
      if (ox > 1e-12 && oy > 1e-12) throw ConfigError("subdomain interiors overlap");
      Interface iface;
      iface.i = static_cast<int>(i);
      iface.j = static_cast<int>(j);
      if (close(ox, 0.0) && oy > 1e-12) {
        // shared vertical segment at the touching x coordinate
        iface.segment = EdgeSegment{true, close(a.x1, b.x0) ? a.x1 : b.x1,
                                    std::max(a.y0, b.y0), std::min(a.y1, b.y1)};
        interfaces_.push_back(iface);
      } else if (close(oy, 0.0) && ox > 1e-12) {
        iface.segment = EdgeSegment{false, close(a.y1, b.y0) ? a.y1 : b.y1,
                                    std::max(a.x0, b.x0), std::min(a.x1, b.x1)};
        interfaces_.push_back(iface);
      }
    }
  }
}

Partition Partition::strips_x(const Rect& domain, int m) {
  return strips_x(domain, std::vector<double>(static_cast<std::size_t>(m),
                                              domain.width() / m));
}

Partition Partition::strips_x(const Rect& domain, const std::vector<double>& widths) {
  std::vector<Rect> subs;
  double x = domain.x0;
  for (double w : widths) {
    subs.push_back(Rect{x, x + w, domain.y0, domain.y1});
    x += w;
  }
  if (!close(x, domain.x1, 1e-9 * std::max(1.0, domain.width()))) {
    throw ConfigError("strip widths do not sum to the domain width");
  }
  subs.back().x1 = domain.x1;
  return Partition(domain, std::move(subs));
}

int Partition::owner_of(double x, double y, double tol) const {
  for (std::size_t i = 0; i < subdomains_.size(); ++i) {
    if (subdomains_[i].contains(x, y, tol)) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> Partition::all_owners(double x, double y, double tol) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < subdomains_.size(); ++i) {
    if (subdomains_[i].contains(x, y, tol)) out.push_back(static_cast<int>(i));
  }
  return out;
}

CouplingMatrix CouplingMatrix::build(const Partition& partition, const KLBasis& global_basis,
                                     const std::vector<KLBasis>& local_bases) {
  if (static_cast<int>(local_bases.size()) != partition.size()) {
    throw BasisMismatch("one local basis per subdomain is required");
  }
  CouplingMatrix out;
  out.global_dim_ = global_basis.dim();
  for (int i = 0; i < partition.size(); ++i) {
    const KLBasis& local = local_bases[static_cast<std::size_t>(i)];
    if (!(local.domain() == partition.subdomains()[static_cast<std::size_t>(i)])) {
      throw BasisMismatch("local basis domain does not match its subdomain");
    }
    if (!local.spec().compatible_with(global_basis.spec())) {
      throw BasisMismatch("covariance parameters differ between local and global bases");
    }
    // <psi~_r^(i), psi_t> over D^(i); both modes are tensor products, so the
    // integral splits into per-axis cross sums on the local quadrature.
    const GridQuadrature& quad = local.quadrature();
    const auto& qx = quad.x();
    const auto& qy = quad.y();
    const auto cross_axis = [](const std::vector<Eigenpair1D>& la, double l_origin,
                               const std::vector<Eigenpair1D>& ga, double g_origin,
                               const AxisQuadrature& q) {
      Eigen::MatrixXd lv(q.size(), static_cast<Eigen::Index>(la.size()));
      Eigen::MatrixXd gv(q.size(), static_cast<Eigen::Index>(ga.size()));
      for (int k = 0; k < q.size(); ++k) {
        for (std::size_t a = 0; a < la.size(); ++a) lv(k, a) = la[a].eval(q.points[k] - l_origin);
        for (std::size_t a = 0; a < ga.size(); ++a) gv(k, a) = ga[a].eval(q.points[k] - g_origin);
      }
      const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());
      return Eigen::MatrixXd(lv.transpose() * w.asDiagonal() * gv);  // local x global
    };
    const Eigen::MatrixXd cx = cross_axis(local.axis_modes_x(), local.domain().x0,
                                          global_basis.axis_modes_x(), global_basis.domain().x0, qx);
    const Eigen::MatrixXd cy = cross_axis(local.axis_modes_y(), local.domain().y0,
                                          global_basis.axis_modes_y(), global_basis.domain().y0, qy);
    Eigen::MatrixXd block(global_basis.dim(), local.dim());
    for (int t = 0; t < global_basis.dim(); ++t) {
      const auto [gt_x, gt_y] = global_basis.mode_pair(t);
      for (int r = 0; r < local.dim(); ++r) {
        const auto [lr_x, lr_y] = local.mode_pair(r);
        block(t, r) = global_basis.mode_scale(t) * local.mode_scale(r) * cx(lr_x, gt_x) *
                      cy(lr_y, gt_y);
      }
    }
    Eigen::MatrixXd assembly =
        global_basis.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * block *
        local.eigenvalues().cwiseSqrt().asDiagonal();
    out.blocks_.push_back(std::move(block));
    out.assembly_.push_back(std::move(assembly));
  }
  return out;
}

Eigen::VectorXd assemble_coeffs(const CouplingMatrix& coupling,
                                const std::vector<Eigen::VectorXd>& local_row) {
  if (static_cast<int>(local_row.size()) != coupling.num_subdomains()) {
    throw LengthMismatch("one coefficient vector per subdomain is required");
  }
  Eigen::VectorXd xi_hat = Eigen::VectorXd::Zero(coupling.global_dim());
  for (int i = 0; i < coupling.num_subdomains(); ++i) {
    const Eigen::MatrixXd& a = coupling.assembly_block(i);
    if (local_row[static_cast<std::size_t>(i)].size() != a.cols()) {
      throw LengthMismatch("local coefficient length does not match its basis");
    }
    xi_hat += a * local_row[static_cast<std::size_t>(i)];
  }
  return xi_hat;
}

StitchedField stitch_nodal(const Partition& partition, const std::vector<KLBasis>& local_bases,
                           const std::vector<Eigen::VectorXd>& local_row, const Grid2D& grid) {
  if (local_bases.size() != local_row.size() ||
      static_cast<int>(local_bases.size()) != partition.size()) {
    throw LengthMismatch("partition, bases and sample row sizes disagree");
  }
  StitchedField out;
  out.values.resize(grid.num_nodes());
  out.interface_jump.assign(partition.interfaces().size(), 0.0);

  const auto local_value = [&](int i, double x, double y) {
    const KLBasis& b = local_bases[static_cast<std::size_t>(i)];
    double v = b.mean(x, y);
    const Eigen::VectorXd& xi = local_row[static_cast<std::size_t>(i)];
    for (int r = 0; r < b.dim(); ++r) {
      v += std::sqrt(b.eigenvalue(r)) * xi[r] * b.eigenfunction(r, x, y);
    }
    return v;
  };

  const double tol = 1e-12 * std::max(grid.hx(), grid.hy());
  for (int id = 0; id < grid.num_nodes(); ++id) {
    const Point2 p = grid.node_coord(id);
    const int owner = partition.owner_of(p.x, p.y, tol);
    if (owner < 0) throw PointOutsideDomain("grid node outside the partition");
    out.values[id] = local_value(owner, p.x, p.y);
  }

  for (std::size_t k = 0; k < partition.interfaces().size(); ++k) {
    const Interface& iface = partition.interfaces()[k];
    const EdgeSegment& seg = iface.segment;
    // jump sampled at the grid nodes lying on the segment
    double max_jump = 0.0;
    if (seg.vertical) {
      double off = 0.0;
      grid.nearest_ix(seg.fixed, &off);
      if (off <= tol) {
        for (int iy = 0; iy < grid.ny(); ++iy) {
          const double y = grid.y_of(iy);
          if (y < seg.lo - tol || y > seg.hi + tol) continue;
          max_jump = std::max(max_jump, std::abs(local_value(iface.i, seg.fixed, y) -
                                                 local_value(iface.j, seg.fixed, y)));
        }
      }
    } else {
      double off = 0.0;
      grid.nearest_iy(seg.fixed, &off);
      if (off <= tol) {
        for (int ix = 0; ix < grid.nx(); ++ix) {
          const double x = grid.x_of(ix);
          if (x < seg.lo - tol || x > seg.hi + tol) continue;
          max_jump = std::max(max_jump, std::abs(local_value(iface.i, x, seg.fixed) -
                                                 local_value(iface.j, x, seg.fixed)));
        }
      }
    }
    out.interface_jump[k] = max_jump;
  }
  return out;
}

FieldMoments posterior_moments(const Eigen::MatrixXd& field_samples) {
  const Eigen::Index n = field_samples.rows();
  if (n < 1) throw EmptySampleSet("no field samples");
  FieldMoments m;
  m.mean = field_samples.colwise().mean();
  m.variance = (field_samples.rowwise() - m.mean.transpose()).array().square().colwise().sum() /
               static_cast<double>(n);
  return m;
}

}  // namespace ddmc
