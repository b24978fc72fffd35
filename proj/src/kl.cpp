#include "ddmc/kl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddmc/errors.hpp"

namespace ddmc {

CovarianceSpec CovarianceSpec::with_constant_mean(double sigma, double corr_len, double a0) {
  CovarianceSpec spec;
  spec.sigma = sigma;
  spec.corr_len = corr_len;
  spec.mean = [a0](double, double) { return a0; };
  return spec;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Eigenvalue equations for the exponential kernel on [-b, b], written in
// singularity-free trigonometric form. Even modes: c*cos(w b) = w*sin(w b);
// odd modes: c*sin(w b) + w*cos(w b) = 0. Exactly one root per bracket
// ((r-1)pi/len, r*pi/len), alternating even/odd.
double even_eq(double w, double c, double b) {
  return c * std::cos(w * b) - w * std::sin(w * b);
}
double odd_eq(double w, double c, double b) {
  return c * std::sin(w * b) + w * std::cos(w * b);
}

}  // namespace

std::vector<Eigenpair1D> eigenpairs_1d(double corr_len, double len, int count) {
  if (count < 1) throw ConfigError("eigenpairs_1d: count must be >= 1");
  if (len <= 0.0 || corr_len <= 0.0) {
    throw ConfigError("eigenpairs_1d: interval length and correlation length must be positive");
  }
  const double c = 1.0 / corr_len;
  const double b = 0.5 * len;
  std::vector<Eigenpair1D> out;
  out.reserve(count);
  for (int r = 1; r <= count; ++r) {
    const bool odd = (r % 2 == 0);
    const auto f = [&](double w) { return odd ? odd_eq(w, c, b) : even_eq(w, c, b); };
    double lo = (r - 1) * kPi / len;
    double hi = r * kPi / len;
    const double inset = 1e-12 * (hi - lo);
    lo += inset;
    hi -= inset;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) {
      hi = lo;
    } else if (fhi != 0.0 && flo * fhi > 0.0) {
      std::ostringstream msg;
      msg << "no sign change in bracket " << r;
      throw RootBracketFailure(msg.str());
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
      } else if (fm * flo > 0.0) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double w = 0.5 * (lo + hi);
    Eigenpair1D ep;
    ep.lambda = 2.0 * c / (w * w + c * c);
    ep.omega = w;
    ep.odd = odd;
    ep.half_len = b;
    const double s = std::sin(2.0 * w * b) / (2.0 * w);
    ep.inv_norm = 1.0 / std::sqrt(odd ? b - s : b + s);
    out.push_back(ep);
  }
  return out;
}

KLBasis::KLBasis(const CovarianceSpec& spec, const Rect& domain, const Grid2D& grid)
    : spec_(spec), domain_(domain), grid_(grid),
      quad_(std::make_shared<GridQuadrature>(grid)) {}

KLBasis KLBasis::build(const CovarianceSpec& spec, const Rect& domain, double delta_kl,
                       const Grid2D& grid, int max_terms) {
  if (delta_kl <= 0.0 || delta_kl >= 1.0) {
    throw ConfigError("delta_kl must lie in (0,1)");
  }
  if (grid.domain() != domain) {
    throw QuadratureGridMismatch("working grid does not cover the basis domain");
  }
  const double len_x = domain.width();
  const double len_y = domain.height();
  const double total_variance = domain.area() * spec.sigma * spec.sigma;

  struct Product {
    double lambda;
    int ix, iy;
  };

  int m = 16;
  std::vector<Eigenpair1D> ex, ey;
  std::vector<Product> kept;
  double captured = 0.0;
  for (;;) {
    ex = eigenpairs_1d(spec.corr_len, len_x, m);
    ey = eigenpairs_1d(spec.corr_len, len_y, m);
    std::vector<Product> prods;
    prods.reserve(static_cast<std::size_t>(m) * m);
    const double s2 = spec.sigma * spec.sigma;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        prods.push_back({s2 * ex[i].lambda * ey[j].lambda, i, j});
      }
    }
    std::sort(prods.begin(), prods.end(), [](const Product& a, const Product& b) {
      if (a.lambda != b.lambda) return a.lambda > b.lambda;
      if (a.ix != b.ix) return a.ix < b.ix;
      return a.iy < b.iy;
    });

    double cum = 0.0;
    int d = 0;
    for (const Product& p : prods) {
      cum += p.lambda;
      ++d;
      if (cum / total_variance > delta_kl) break;
    }
    if (cum / total_variance <= delta_kl || d >= max_terms) {
      if (m >= 4 * max_terms) {
        throw TruncationOverflow("cannot capture requested variance within the term cap");
      }
      m *= 2;
      continue;
    }
    // Products with a 1D index beyond m are bounded by these corners; if the
    // d-th retained eigenvalue dominates both, the top-d list is complete.
    const double tail_x = s2 * ex[m - 1].lambda * ey[0].lambda;
    const double tail_y = s2 * ex[0].lambda * ey[m - 1].lambda;
    const double lambda_d = prods[d - 1].lambda;
    if (tail_x >= lambda_d || tail_y >= lambda_d) {
      m *= 2;
      continue;
    }
    kept.assign(prods.begin(), prods.begin() + d);
    captured = cum / total_variance;
    break;
  }

  KLBasis basis(spec, domain, grid);
  basis.modes_x_ = std::move(ex);
  basis.modes_y_ = std::move(ey);
  basis.captured_ = captured;
  const int d = static_cast<int>(kept.size());
  basis.eigvals_.resize(d);
  basis.pairs_.resize(d);
  basis.scale_.assign(d, 1.0);
  for (int r = 0; r < d; ++r) {
    basis.eigvals_[r] = kept[r].lambda;
    basis.pairs_[r] = {kept[r].ix, kept[r].iy};
  }

  // Renormalize against the working quadrature so the discrete Gram diagonal
  // is exactly one. The analytic normalization already gets within ~1e-12;
  // this pins down the discrete inner-product convention used everywhere else.
  const auto& qx = basis.quad_->x();
  const auto& qy = basis.quad_->y();
  std::vector<double> nx(basis.modes_x_.size(), 0.0), ny(basis.modes_y_.size(), 0.0);
  for (std::size_t i = 0; i < basis.modes_x_.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < qx.points.size(); ++k) {
      const double v = basis.modes_x_[i].eval(qx.points[k] - domain.x0);
      s += qx.weights[k] * v * v;
    }
    nx[i] = s;
  }
  for (std::size_t j = 0; j < basis.modes_y_.size(); ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < qy.points.size(); ++k) {
      const double v = basis.modes_y_[j].eval(qy.points[k] - domain.y0);
      s += qy.weights[k] * v * v;
    }
    ny[j] = s;
  }
  for (int r = 0; r < d; ++r) {
    const auto [i, j] = basis.pairs_[r];
    basis.scale_[r] = 1.0 / std::sqrt(nx[i] * ny[j]);
  }
  return basis;
}

double KLBasis::eigenfunction(int r, double x, double y) const {
  const auto [i, j] = pairs_[r];
  return scale_[r] * modes_x_[i].eval(x - domain_.x0) * modes_y_[j].eval(y - domain_.y0);
}

Eigen::MatrixXd KLBasis::modes_at(const Eigen::MatrixX2d& points) const {
  const double tol_x = 1e-12 * std::max(1.0, domain_.width());
  const double tol_y = 1e-12 * std::max(1.0, domain_.height());
  const Eigen::Index n = points.rows();
  const int d = dim();
  // Per-axis mode values first; the 2D mode is their product.
  Eigen::MatrixXd vx(n, static_cast<Eigen::Index>(modes_x_.size()));
  Eigen::MatrixXd vy(n, static_cast<Eigen::Index>(modes_y_.size()));
  for (Eigen::Index p = 0; p < n; ++p) {
    const double x = points(p, 0), y = points(p, 1);
    if (!domain_.contains(x, y, std::max(tol_x, tol_y))) {
      std::ostringstream msg;
      msg << "(" << x << ", " << y << ")";
      throw PointOutsideDomain(msg.str());
    }
    for (std::size_t i = 0; i < modes_x_.size(); ++i) vx(p, i) = modes_x_[i].eval(x - domain_.x0);
    for (std::size_t j = 0; j < modes_y_.size(); ++j) vy(p, j) = modes_y_[j].eval(y - domain_.y0);
  }
  Eigen::MatrixXd out(n, d);
  for (int r = 0; r < d; ++r) {
    const auto [i, j] = pairs_[r];
    out.col(r) = scale_[r] * vx.col(i).cwiseProduct(vy.col(j));
  }
  return out;
}

Eigen::MatrixXd KLBasis::modes_on_nodes(const Grid2D& grid) const {
  return modes_at(grid.node_coords());
}

Eigen::VectorXd KLBasis::evaluate(const FieldSample& sample, const Eigen::MatrixX2d& points) const {
  if (sample.xi.size() != dim()) {
    throw LengthMismatch("coefficient length does not match basis dimension");
  }
  const Eigen::MatrixXd modes = modes_at(points);
  Eigen::VectorXd out = modes * eigvals_.cwiseSqrt().cwiseProduct(sample.xi);
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    out[p] += spec_.mean(points(p, 0), points(p, 1));
  }
  return out;
}

Eigen::MatrixXd KLBasis::quadrature_gram() const {
  const auto& qx = quad_->x();
  const auto& qy = quad_->y();
  // 1D Grams per axis; 2D Gram entries are products of 1D entries.
  const int mx = static_cast<int>(modes_x_.size());
  const int my = static_cast<int>(modes_y_.size());
  Eigen::MatrixXd px(qx.size(), mx), py(qy.size(), my);
  for (int k = 0; k < qx.size(); ++k)
    for (int i = 0; i < mx; ++i) px(k, i) = modes_x_[i].eval(qx.points[k] - domain_.x0);
  for (int k = 0; k < qy.size(); ++k)
    for (int j = 0; j < my; ++j) py(k, j) = modes_y_[j].eval(qy.points[k] - domain_.y0);
  const Eigen::VectorXd wx = Eigen::Map<const Eigen::VectorXd>(qx.weights.data(), qx.size());
  const Eigen::VectorXd wy = Eigen::Map<const Eigen::VectorXd>(qy.weights.data(), qy.size());
  const Eigen::MatrixXd gx = px.transpose() * wx.asDiagonal() * px;
  const Eigen::MatrixXd gy = py.transpose() * wy.asDiagonal() * py;
  const int d = dim();
  Eigen::MatrixXd gram(d, d);
  for (int r = 0; r < d; ++r) {
    const auto [ir, jr] = pairs_[r];
    for (int t = 0; t < d; ++t) {
      const auto [it, jt] = pairs_[t];
      gram(r, t) = scale_[r] * scale_[t] * gx(ir, it) * gy(jr, jt);
    }
  }
  return gram;
}

std::string KLBasis::summary_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"domain\":[" << domain_.x0 << "," << domain_.x1 << "," << domain_.y0 << ","
     << domain_.y1 << "],\"L\":" << spec_.corr_len << ",\"sigma\":" << spec_.sigma
     << ",\"d\":" << dim() << ",\"captured\":" << captured_ << ",\"eigvals\":[";
  for (int r = 0; r < dim(); ++r) {
    if (r) os << ",";
    os << eigvals_[r];
  }
  os << "]}";
  return os.str();
}

Eigen::VectorXd extract_local_coeffs(const std::function<double(double, double)>& field,
                                     const KLBasis& basis) {
  const GridQuadrature& quad = basis.quadrature();
  const Eigen::MatrixX2d pts = quad.points();
  const Eigen::VectorXd w = quad.weights();
  Eigen::VectorXd centered(pts.rows());
  for (Eigen::Index p = 0; p < pts.rows(); ++p) {
    centered[p] = field(pts(p, 0), pts(p, 1)) - basis.mean(pts(p, 0), pts(p, 1));
  }
  const Eigen::MatrixXd modes = basis.modes_at(pts);
  Eigen::VectorXd proj = modes.transpose() * w.cwiseProduct(centered);
  return proj.cwiseQuotient(basis.eigenvalues().cwiseSqrt());
}

Eigen::VectorXd extract_local_coeffs(const FieldSample& field, const KLBasis& basis) {
  const GridQuadrature& quad = basis.quadrature();
  const Eigen::MatrixX2d pts = quad.points();
  const Eigen::VectorXd w = quad.weights();
  Eigen::VectorXd centered = field.basis->evaluate(field, pts);
  for (Eigen::Index p = 0; p < pts.rows(); ++p) {
    centered[p] -= basis.mean(pts(p, 0), pts(p, 1));
  }
  const Eigen::MatrixXd modes = basis.modes_at(pts);
  Eigen::VectorXd proj = modes.transpose() * w.cwiseProduct(centered);
  return proj.cwiseQuotient(basis.eigenvalues().cwiseSqrt());
}

}  // namespace ddmc
