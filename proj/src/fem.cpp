#include "ddmc/fem.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ddmc/errors.hpp"

namespace ddmc {

EdgeCondition EdgeCondition::dirichlet(double value) { return EdgeCondition(Data(value)); }
EdgeCondition EdgeCondition::dirichlet(std::vector<double> nodal_values) {
  return EdgeCondition(Data(std::move(nodal_values)));
}
EdgeCondition EdgeCondition::dirichlet(std::function<double(double, double)> fn) {
  return EdgeCondition(Data(std::move(fn)));
}
EdgeCondition EdgeCondition::neumann(double flux) {
  if (flux != 0.0) {
    throw Unsupported("only homogeneous Neumann edges are supported");
  }
  return EdgeCondition(Data(Neumann{}));
}

double EdgeCondition::value_at(int k, double x, double y) const {
  if (const double* v = std::get_if<double>(&data_)) return *v;
  if (const auto* vec = std::get_if<std::vector<double>>(&data_)) {
    if (k < 0 || k >= static_cast<int>(vec->size())) {
      throw LengthMismatch("nodal Dirichlet data does not cover the edge");
    }
    return (*vec)[static_cast<std::size_t>(k)];
  }
  if (const auto* fn = std::get_if<std::function<double(double, double)>>(&data_)) {
    return (*fn)(x, y);
  }
  throw Error("value_at called on a Neumann edge");
}

const EdgeCondition& BoundarySpec::edge(EdgeSide s) const {
  switch (s) {
    case EdgeSide::Left: return left;
    case EdgeSide::Right: return right;
    case EdgeSide::Bottom: return bottom;
    default: return top;
  }
}

bool BoundarySpec::any_dirichlet() const {
  return left.is_dirichlet() || right.is_dirichlet() || bottom.is_dirichlet() ||
         top.is_dirichlet();
}

SourceField SourceField::gaussian_bump(Point2 center, double amplitude) {
  return SourceField([center, amplitude](double x, double y) {
    const double dx = x - center.x, dy = y - center.y;
    return amplitude * std::exp(-(dx * dx + dy * dy));
  });
}

Eigen::VectorXd Permeability::at_gauss_points(const Grid2D& grid,
                                              const Eigen::MatrixX2d& pts) const {
  Eigen::VectorXd out(pts.rows());
  if (const auto* fn = std::get_if<std::function<double(double, double)>>(&data_)) {
    for (Eigen::Index p = 0; p < pts.rows(); ++p) out[p] = (*fn)(pts(p, 0), pts(p, 1));
    return out;
  }
  const Eigen::VectorXd& nodal = std::get<Eigen::VectorXd>(data_);
  if (nodal.size() != grid.num_nodes()) {
    throw LengthMismatch("nodal permeability length does not match grid");
  }
  for (Eigen::Index p = 0; p < pts.rows(); ++p) {
    const double x = pts(p, 0), y = pts(p, 1);
    int ex = static_cast<int>((x - grid.domain().x0) / grid.hx());
    int ey = static_cast<int>((y - grid.domain().y0) / grid.hy());
    ex = std::min(ex, grid.nx() - 2);
    ey = std::min(ey, grid.ny() - 2);
    const double sx = (x - grid.x_of(ex)) / grid.hx();
    const double sy = (y - grid.y_of(ey)) / grid.hy();
    const double v00 = nodal[grid.node_id(ex, ey)];
    const double v10 = nodal[grid.node_id(ex + 1, ey)];
    const double v01 = nodal[grid.node_id(ex, ey + 1)];
    const double v11 = nodal[grid.node_id(ex + 1, ey + 1)];
    out[p] = (1 - sx) * (1 - sy) * v00 + sx * (1 - sy) * v10 + (1 - sx) * sy * v01 +
             sx * sy * v11;
  }
  return out;
}

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

struct RefShapes {
  double N[4][4];     // gauss point x shape function
  double dNdx[4][4];  // physical x-derivative
  double dNdy[4][4];
};

RefShapes reference_shapes(double hx, double hy) {
  RefShapes r{};
  const double gp[2] = {-kGauss, kGauss};
  int q = 0;
  for (double gy : gp) {
    for (double gx : gp) {
      r.N[q][0] = 0.25 * (1 - gx) * (1 - gy);
      r.N[q][1] = 0.25 * (1 + gx) * (1 - gy);
      r.N[q][2] = 0.25 * (1 + gx) * (1 + gy);
      r.N[q][3] = 0.25 * (1 - gx) * (1 + gy);
      const double dxi[4] = {-(1 - gy), (1 - gy), (1 + gy), -(1 + gy)};
      const double deta[4] = {-(1 - gx), -(1 + gx), (1 + gx), (1 - gx)};
      for (int a = 0; a < 4; ++a) {
        r.dNdx[q][a] = 0.25 * dxi[a] * 2.0 / hx;
        r.dNdy[q][a] = 0.25 * deta[a] * 2.0 / hy;
      }
      ++q;
    }
  }
  return r;
}

}  // namespace

DiffusionSolver::DiffusionSolver(const Grid2D& grid, BoundarySpec bc, const SourceField& src)
    : grid_(grid), bc_(std::move(bc)) {
  if (!bc_.any_dirichlet()) {
    throw SingularSystem("no Dirichlet edge; the pure-Neumann problem is singular");
  }
  const int nx = grid.nx(), ny = grid.ny();
  const double hx = grid.hx(), hy = grid.hy();
  const RefShapes shapes = reference_shapes(hx, hy);
  const double wq = 0.25 * hx * hy;  // weight per 2x2 Gauss point

  for (int q = 0; q < 4; ++q) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        elem_matrices_[q][a][b] =
            wq * (shapes.dNdx[q][a] * shapes.dNdx[q][b] + shapes.dNdy[q][a] * shapes.dNdy[q][b]);
      }
    }
  }

  // Gauss points, element-major; element order ey-major matches cell loops below.
  const int ncells = grid.num_cells();
  gauss_pts_.resize(static_cast<Eigen::Index>(ncells) * 4, 2);
  const double gp[2] = {-kGauss, kGauss};
  Eigen::Index row = 0;
  for (int ey = 0; ey < ny - 1; ++ey) {
    for (int ex = 0; ex < nx - 1; ++ex) {
      for (double gy : gp) {
        for (double gx : gp) {
          gauss_pts_(row, 0) = grid.x_of(ex) + 0.5 * hx * (1 + gx);
          gauss_pts_(row, 1) = grid.y_of(ey) + 0.5 * hy * (1 + gy);
          ++row;
        }
      }
    }
  }

  // Source load vector.
  load_ = Eigen::VectorXd::Zero(grid.num_nodes());
  row = 0;
  for (int ey = 0; ey < ny - 1; ++ey) {
    for (int ex = 0; ex < nx - 1; ++ex) {
      const int nodes[4] = {grid.node_id(ex, ey), grid.node_id(ex + 1, ey),
                            grid.node_id(ex + 1, ey + 1), grid.node_id(ex, ey + 1)};
      for (int q = 0; q < 4; ++q, ++row) {
        const double f = wq * src(gauss_pts_(row, 0), gauss_pts_(row, 1));
        for (int a = 0; a < 4; ++a) load_[nodes[a]] += f * shapes.N[q][a];
      }
    }
  }

  // Dirichlet constraints. Horizontal edges are applied first so that
  // vertical-edge values (exterior walls and interfaces) win at corners.
  free_index_.assign(grid.num_nodes(), 0);
  dirichlet_values_ = Eigen::VectorXd::Zero(grid.num_nodes());
  std::vector<char> constrained(grid.num_nodes(), 0);
  const auto apply_edge = [&](EdgeSide side) {
    const EdgeCondition& cond = bc_.edge(side);
    if (!cond.is_dirichlet()) return;
    const bool horizontal = (side == EdgeSide::Bottom || side == EdgeSide::Top);
    const int count = horizontal ? nx : ny;
    for (int k = 0; k < count; ++k) {
      int id;
      if (side == EdgeSide::Left) id = grid.node_id(0, k);
      else if (side == EdgeSide::Right) id = grid.node_id(nx - 1, k);
      else if (side == EdgeSide::Bottom) id = grid.node_id(k, 0);
      else id = grid.node_id(k, ny - 1);
      const Point2 p = grid.node_coord(id);
      constrained[id] = 1;
      dirichlet_values_[id] = cond.value_at(k, p.x, p.y);
    }
  };
  apply_edge(EdgeSide::Bottom);
  apply_edge(EdgeSide::Top);
  apply_edge(EdgeSide::Left);
  apply_edge(EdgeSide::Right);

  int nfree = 0;
  for (int id = 0; id < grid.num_nodes(); ++id) {
    if (constrained[id]) {
      free_index_[id] = -1;
    } else {
      free_index_[id] = nfree++;
      free_nodes_.push_back(id);
    }
  }

  // Sparsity pattern of the constrained system and per-element scatter slots.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(ncells) * 16);
  for (int ey = 0; ey < ny - 1; ++ey) {
    for (int ex = 0; ex < nx - 1; ++ex) {
      const int nodes[4] = {grid.node_id(ex, ey), grid.node_id(ex + 1, ey),
                            grid.node_id(ex + 1, ey + 1), grid.node_id(ex, ey + 1)};
      for (int a = 0; a < 4; ++a) {
        const int ia = free_index_[nodes[a]];
        if (ia < 0) continue;
        for (int b = 0; b < 4; ++b) {
          const int ib = free_index_[nodes[b]];
          if (ib < 0) continue;
          trips.emplace_back(ia, ib, 1.0);
        }
      }
    }
  }
  pattern_.resize(nfree, nfree);
  pattern_.setFromTriplets(trips.begin(), trips.end());
  pattern_.makeCompressed();

  slot_.assign(static_cast<std::size_t>(ncells) * 16, -1);
  std::size_t cell = 0;
  for (int ey = 0; ey < ny - 1; ++ey) {
    for (int ex = 0; ex < nx - 1; ++ex, ++cell) {
      const int nodes[4] = {grid.node_id(ex, ey), grid.node_id(ex + 1, ey),
                            grid.node_id(ex + 1, ey + 1), grid.node_id(ex, ey + 1)};
      for (int a = 0; a < 4; ++a) {
        const int ia = free_index_[nodes[a]];
        if (ia < 0) continue;
        for (int b = 0; b < 4; ++b) {
          const int ib = free_index_[nodes[b]];
          if (ib < 0) continue;
          // column-major CSC: find row ia within column ib
          for (int it = pattern_.outerIndexPtr()[ib]; it < pattern_.outerIndexPtr()[ib + 1];
               ++it) {
            if (pattern_.innerIndexPtr()[it] == ia) {
              slot_[cell * 16 + static_cast<std::size_t>(a) * 4 + b] = it;
              break;
            }
          }
        }
      }
    }
  }
}

FemSolution DiffusionSolver::solve(const Eigen::VectorXd& perm_at_gauss) {
  const auto t0 = std::chrono::steady_clock::now();
  if (perm_at_gauss.size() != gauss_pts_.rows()) {
    throw LengthMismatch("permeability sample count does not match gauss points");
  }
  for (Eigen::Index p = 0; p < perm_at_gauss.size(); ++p) {
    if (!(perm_at_gauss[p] > 0.0)) {
      std::ostringstream msg;
      msg << "a(" << gauss_pts_(p, 0) << ", " << gauss_pts_(p, 1) << ") = " << perm_at_gauss[p];
      throw NonPositivePermeability(msg.str());
    }
  }

  const int nx = grid_.nx(), ny = grid_.ny();
  double* vals = pattern_.valuePtr();
  std::fill(vals, vals + pattern_.nonZeros(), 0.0);
  Eigen::VectorXd rhs(free_nodes_.size());
  for (std::size_t i = 0; i < free_nodes_.size(); ++i) rhs[i] = load_[free_nodes_[i]];

  std::size_t cell = 0;
  Eigen::Index gp_row = 0;
  for (int ey = 0; ey < ny - 1; ++ey) {
    for (int ex = 0; ex < nx - 1; ++ex, ++cell) {
      const int nodes[4] = {grid_.node_id(ex, ey), grid_.node_id(ex + 1, ey),
                            grid_.node_id(ex + 1, ey + 1), grid_.node_id(ex, ey + 1)};
      double ke[4][4] = {};
      for (int q = 0; q < 4; ++q, ++gp_row) {
        const double a = perm_at_gauss[gp_row];
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) ke[i][j] += a * elem_matrices_[q][i][j];
        }
      }
      for (int a4 = 0; a4 < 4; ++a4) {
        const int ia = free_index_[nodes[a4]];
        if (ia < 0) continue;
        for (int b4 = 0; b4 < 4; ++b4) {
          const int s = slot_[cell * 16 + static_cast<std::size_t>(a4) * 4 + b4];
          if (s >= 0) {
            vals[s] += ke[a4][b4];
          } else {
            rhs[ia] -= ke[a4][b4] * dirichlet_values_[nodes[b4]];
          }
        }
      }
    }
  }

  if (!analyzed_) {
    llt_.analyzePattern(pattern_);
    analyzed_ = true;
  }
  llt_.factorize(pattern_);
  if (llt_.info() != Eigen::Success) {
    throw SingularSystem("sparse Cholesky factorization failed");
  }
  const Eigen::VectorXd uf = llt_.solve(rhs);

  const double rhs_norm = rhs.norm();
  const double resid = (pattern_ * uf - rhs).norm();
  if (resid > 1e-10 * std::max(rhs_norm, 1e-30)) {
    std::ostringstream msg;
    msg << "relative residual " << resid / std::max(rhs_norm, 1e-30);
    throw SingularSystem(msg.str());
  }

  FemSolution sol{Eigen::VectorXd(grid_.num_nodes()), grid_, grid_.num_cells(), 0.0};
  sol.u = dirichlet_values_;
  for (std::size_t i = 0; i < free_nodes_.size(); ++i) sol.u[free_nodes_[i]] = uf[i];
  sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

FemSolution DiffusionSolver::solve(const Permeability& perm) {
  return solve(perm.at_gauss_points(grid_, gauss_pts_));
}

FemSolution assemble_and_solve(const Grid2D& grid, const Permeability& perm,
                               const BoundarySpec& bc, const SourceField& src) {
  DiffusionSolver solver(grid, bc, src);
  return solver.solve(perm);
}

Eigen::VectorXd observe(const FemSolution& sol, const std::vector<Point2>& sensors) {
  const Grid2D& grid = sol.grid;
  Eigen::VectorXd out(static_cast<Eigen::Index>(sensors.size()));
  for (std::size_t s = 0; s < sensors.size(); ++s) {
    double offx = 0.0, offy = 0.0;
    const int ix = grid.nearest_ix(sensors[s].x, &offx);
    const int iy = grid.nearest_iy(sensors[s].y, &offy);
    if (offx > 1e-12 * grid.hx() || offy > 1e-12 * grid.hy()) {
      std::ostringstream msg;
      msg << "sensor (" << sensors[s].x << ", " << sensors[s].y << ") is not a grid node";
      throw SensorOffGrid(msg.str());
    }
    out[static_cast<Eigen::Index>(s)] = sol.u[grid.node_id(ix, iy)];
  }
  return out;
}

std::vector<std::pair<double, double>> restrict_solution(const FemSolution& sol,
                                                         const EdgeSegment& edge) {
  const Grid2D& grid = sol.grid;
  std::vector<std::pair<double, double>> out;
  double off = 0.0;
  if (edge.vertical) {
    const int ix = grid.nearest_ix(edge.fixed, &off);
    if (off > 1e-12 * grid.hx()) throw EdgeOffGrid("segment x is not a grid line");
    const int j0 = grid.nearest_iy(edge.lo, &off);
    if (off > 1e-12 * grid.hy()) throw EdgeOffGrid("segment start is not a grid node");
    const int j1 = grid.nearest_iy(edge.hi, &off);
    if (off > 1e-12 * grid.hy()) throw EdgeOffGrid("segment end is not a grid node");
    for (int j = j0; j <= j1; ++j) out.emplace_back(grid.y_of(j), sol.u[grid.node_id(ix, j)]);
  } else {
    const int iy = grid.nearest_iy(edge.fixed, &off);
    if (off > 1e-12 * grid.hy()) throw EdgeOffGrid("segment y is not a grid line");
    const int i0 = grid.nearest_ix(edge.lo, &off);
    if (off > 1e-12 * grid.hx()) throw EdgeOffGrid("segment start is not a grid node");
    const int i1 = grid.nearest_ix(edge.hi, &off);
    if (off > 1e-12 * grid.hx()) throw EdgeOffGrid("segment end is not a grid node");
    for (int i = i0; i <= i1; ++i) out.emplace_back(grid.x_of(i), sol.u[grid.node_id(i, iy)]);
  }
  return out;
}

}  // namespace ddmc
