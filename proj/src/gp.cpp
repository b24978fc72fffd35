#include "ddmc/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddmc/errors.hpp"

namespace ddmc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::MatrixXd kernel_matrix(const GPHyper& h, const std::vector<double>& s) {
  const int n = static_cast<int>(s.size());
  const double sf2 = h.sigma_f * h.sigma_f;
  const double inv2l2 = 0.5 / (h.length_scale * h.length_scale);
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = sf2 + h.noise_std * h.noise_std;
    for (int j = i + 1; j < n; ++j) {
      const double d = s[i] - s[j];
      K(i, j) = K(j, i) = sf2 * std::exp(-d * d * inv2l2);
    }
  }
  return K;
}

// Cholesky with the escalating-nugget ladder. Returns the nugget used.
double factorize_with_nugget(const Eigen::MatrixXd& K, double sigma_f,
                             Eigen::LLT<Eigen::MatrixXd>& llt) {
  const double sf2 = sigma_f * sigma_f;
  const double ladder[4] = {0.0, 1e-10 * sf2, 1e-8 * sf2, 1e-6 * sf2};
  for (double nugget : ladder) {
    Eigen::MatrixXd Kn = K;
    if (nugget > 0.0) Kn.diagonal().array() += nugget;
    llt.compute(Kn);
    if (llt.info() == Eigen::Success) return nugget;
  }
  throw FactorizationFailure("covariance matrix is not positive definite after nugget escalation");
}

double center_offset(const GPTrainingSet& data) {
  return data.size() >= 2 ? data.targets.mean() : 0.0;
}

}  // namespace

GPModel::GPModel(GPHyper hyper, GPTrainingSet data)
    : hyper_(hyper), data_(std::move(data)) {
  if (data_.size() < 1) throw ConfigError("GP needs at least one training point");
  if (data_.targets.size() != data_.size()) {
    throw LengthMismatch("GP training inputs and targets differ in length");
  }
  ybar_ = center_offset(data_);
  const Eigen::MatrixXd K = kernel_matrix(hyper_, data_.inputs);
  nugget_ = factorize_with_nugget(K, hyper_.sigma_f, llt_);
  weights_ = llt_.solve(data_.targets.array() - ybar_).matrix();
}

std::pair<double, double> GPModel::predict(double s) const {
  const int n = data_.size();
  const double sf2 = hyper_.sigma_f * hyper_.sigma_f;
  const double inv2l2 = 0.5 / (hyper_.length_scale * hyper_.length_scale);
  Eigen::VectorXd ks(n);
  for (int i = 0; i < n; ++i) {
    const double d = s - data_.inputs[i];
    ks[i] = sf2 * std::exp(-d * d * inv2l2);
  }
  const double mean = ybar_ + ks.dot(weights_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  double var = sf2 - v.squaredNorm();
  if (var < 0.0) var = 0.0;
  return {mean, var};
}

Eigen::VectorXd GPModel::predict_mean(const std::vector<double>& s) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) out[static_cast<Eigen::Index>(i)] = predict(s[i]).first;
  return out;
}

Eigen::VectorXd GPModel::predict_variance(const std::vector<double>& s) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) out[static_cast<Eigen::Index>(i)] = predict(s[i]).second;
  return out;
}

double gp_nlml(const GPHyper& hyper, const GPTrainingSet& data) {
  if (data.size() < 1) throw ConfigError("nlml needs at least one training point");
  const double ybar = center_offset(data);
  const Eigen::VectorXd y = data.targets.array() - ybar;
  const Eigen::MatrixXd K = kernel_matrix(hyper, data.inputs);
  Eigen::LLT<Eigen::MatrixXd> llt;
  factorize_with_nugget(K, hyper.sigma_f, llt);
  const Eigen::VectorXd alpha = llt.solve(y);
  double logdet = 0.0;
  const auto& L = llt.matrixLLT();
  for (int i = 0; i < L.rows(); ++i) logdet += std::log(L(i, i));
  return logdet + 0.5 * y.dot(alpha) + 0.5 * data.size() * kLog2Pi;
}

GPFitResult fit_hyper(const GPTrainingSet& data, double noise_std, const GPFitOptions& opts) {
  if (data.size() < 1) throw ConfigError("fit_hyper needs at least one training point");

  const int n = data.size();
  double scale;
  bool degenerate = false;
  if (n >= 2) {
    const double mean = data.targets.mean();
    scale = std::sqrt((data.targets.array() - mean).square().sum() / n);
    if (scale == 0.0) degenerate = true;
  } else {
    scale = std::max(std::abs(data.targets[0]), 1e-8);
  }
  if (degenerate) {
    // All targets equal: centered residuals vanish and sigma_f is floored.
    return {GPHyper{1e-8, opts.input_scale, noise_std}, true};
  }

  const auto objective = [&](double log_sf, double log_lf) {
    GPHyper h{std::exp(log_sf), std::exp(log_lf), noise_std};
    return gp_nlml(h, data);
  };

  const int g = opts.grid_points;
  const double sf_lo = std::log(1e-3 * scale), sf_hi = std::log(1e3 * scale);
  const double lf_lo = std::log(1e-2 * opts.input_scale), lf_hi = std::log(1e1 * opts.input_scale);
  double best_val = std::numeric_limits<double>::infinity();
  double best_sf = sf_lo, best_lf = lf_lo;
  for (int i = 0; i < g; ++i) {
    const double lsf = sf_lo + (sf_hi - sf_lo) * i / (g - 1);
    for (int j = 0; j < g; ++j) {
      const double llf = lf_lo + (lf_hi - lf_lo) * j / (g - 1);
      const double v = objective(lsf, llf);
      if (v < best_val) {
        best_val = v;
        best_sf = lsf;
        best_lf = llf;
      }
    }
  }

  // Nelder-Mead refinement in log space from the best grid cell. The best
  // point ever evaluated is returned, so the grid minimum is never lost.
  struct Vertex {
    double x[2];
    double f;
  };
  const double step_sf = (sf_hi - sf_lo) / (g - 1);
  const double step_lf = (lf_hi - lf_lo) / (g - 1);
  Vertex simplex[3] = {
      {{best_sf, best_lf}, best_val},
      {{best_sf + step_sf, best_lf}, objective(best_sf + step_sf, best_lf)},
      {{best_sf, best_lf + step_lf}, objective(best_sf, best_lf + step_lf)},
  };
  int evals = 2;
  double overall_best = best_val, overall_sf = best_sf, overall_lf = best_lf;
  const auto note = [&](const Vertex& v) {
    if (v.f < overall_best) {
      overall_best = v.f;
      overall_sf = v.x[0];
      overall_lf = v.x[1];
    }
  };
  note(simplex[1]);
  note(simplex[2]);
  while (evals < opts.max_refine_evals) {
    std::sort(simplex, simplex + 3, [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const double cx = 0.5 * (simplex[0].x[0] + simplex[1].x[0]);
    const double cy = 0.5 * (simplex[0].x[1] + simplex[1].x[1]);
    Vertex refl{{cx + (cx - simplex[2].x[0]), cy + (cy - simplex[2].x[1])}, 0.0};
    refl.f = objective(refl.x[0], refl.x[1]);
    ++evals;
    note(refl);
    if (refl.f < simplex[0].f) {
      Vertex exp{{cx + 2.0 * (cx - simplex[2].x[0]), cy + 2.0 * (cy - simplex[2].x[1])}, 0.0};
      exp.f = objective(exp.x[0], exp.x[1]);
      ++evals;
      note(exp);
      simplex[2] = exp.f < refl.f ? exp : refl;
    } else if (refl.f < simplex[1].f) {
      simplex[2] = refl;
    } else {
      Vertex con{{cx + 0.5 * (simplex[2].x[0] - cx), cy + 0.5 * (simplex[2].x[1] - cy)}, 0.0};
      con.f = objective(con.x[0], con.x[1]);
      ++evals;
      note(con);
      if (con.f < simplex[2].f) {
        simplex[2] = con;
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[k].x[0] = 0.5 * (simplex[k].x[0] + simplex[0].x[0]);
          simplex[k].x[1] = 0.5 * (simplex[k].x[1] + simplex[0].x[1]);
          simplex[k].f = objective(simplex[k].x[0], simplex[k].x[1]);
          ++evals;
          note(simplex[k]);
        }
      }
    }
    const double spread = std::max(std::abs(simplex[0].f - simplex[2].f),
                                   std::abs(simplex[0].x[0] - simplex[2].x[0]) +
                                       std::abs(simplex[0].x[1] - simplex[2].x[1]));
    if (spread < 1e-12) break;
  }
  return {GPHyper{std::exp(overall_sf), std::exp(overall_lf), noise_std}, false};
}

ActiveFitResult active_fit(const EdgeSegment& interface, const std::vector<SensorDatum>& sensors,
                           const std::vector<double>& test_s, double delta_tol,
                           double gp_noise_std, const GPFitOptions& opts) {
  if (sensors.empty()) throw ConfigError("active_fit: sensor pool is empty");
  if (test_s.empty()) throw ConfigError("active_fit: test set is empty");

  GPFitOptions fit_opts = opts;
  fit_opts.input_scale = interface.length();

  const auto dist2 = [](const Point2& a, const Point2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
  };
  const auto arclength = [&](const Point2& p) {
    return interface.vertical ? p.y - interface.lo : p.x - interface.lo;
  };

  std::vector<char> used(sensors.size(), 0);
  const Point2 mid = interface.midpoint();
  int first = 0;
  for (std::size_t k = 1; k < sensors.size(); ++k) {
    if (dist2(sensors[k].pos, mid) < dist2(sensors[static_cast<std::size_t>(first)].pos, mid)) {
      first = static_cast<int>(k);
    }
  }

  GPTrainingSet training;
  const auto add_sensor = [&](int k) {
    used[static_cast<std::size_t>(k)] = 1;
    training.inputs.push_back(arclength(sensors[static_cast<std::size_t>(k)].pos));
    training.targets.conservativeResize(training.targets.size() + 1);
    training.targets[training.targets.size() - 1] = sensors[static_cast<std::size_t>(k)].value;
  };
  add_sensor(first);

  ActiveFitResult result{GPModel(GPHyper{1.0, 1.0, gp_noise_std}, training), {}, {}, 0.0, false};
  int last_added = first;
  for (;;) {
    const GPFitResult fit = fit_hyper(training, gp_noise_std, fit_opts);
    GPModel model(fit.hyper, training);
    if (fit.degenerate) model.mark_degenerate();

    double sigma_max = 0.0;
    int arg_max = 0;
    for (std::size_t t = 0; t < test_s.size(); ++t) {
      const double var = model.predict(test_s[t]).second;
      if (var > sigma_max) {
        sigma_max = var;
        arg_max = static_cast<int>(t);
      }
    }
    result.model = std::move(model);
    result.sigma_max = sigma_max;
    result.history.push_back({last_added, sigma_max});

    if (sigma_max < delta_tol) break;
    // all sensors consumed and still above threshold: flag, keep best model
    bool any_left = false;
    for (char u : used) {
      if (!u) {
        any_left = true;
        break;
      }
    }
    if (!any_left) {
      result.pool_exhausted = true;
      break;
    }

    const Point2 xbar = interface.point_at(test_s[static_cast<std::size_t>(arg_max)]);
    int next = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sensors.size(); ++k) {
      if (used[k]) continue;
      const double d = dist2(sensors[k].pos, xbar);
      if (d < best) {
        best = d;
        next = static_cast<int>(k);
      }
    }
    add_sensor(next);
    last_added = next;
  }

  for (std::size_t k = 0; k < sensors.size(); ++k) {
    if (used[k]) result.training_sensors.push_back(static_cast<int>(k));
  }
  return result;
}

}  // namespace ddmc
