#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ddmc {

/// Deterministic map from coefficients to an observation vector.
struct ForwardModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> evaluate;
  int dim_in = 0;
  int dim_out = 0;
};

/// -||data - F(xi)||^2 / (2 noise_std^2), the unnormalized log-likelihood.
double log_likelihood(const ForwardModel& model, const Eigen::VectorXd& xi,
                      const Eigen::VectorXd& data, double noise_std);

/// Componentwise box prior; the density enters MH only as a support indicator.
struct PriorBox {
  double lo = -1.0;
  double hi = 1.0;

  bool contains(const Eigen::VectorXd& xi) const {
    return (xi.array() >= lo).all() && (xi.array() <= hi).all();
  }
};

/// Random-walk MH trace. Consecutive equal rows are rejections.
struct Chain {
  Eigen::MatrixXd samples;         // N x d
  Eigen::VectorXd misfit;          // data-misfit eta(xi^s) per iteration
  std::vector<std::uint8_t> accepted;  // 1 where the proposal was taken
  long accept_count = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  long forward_evals = 0;          // init + in-box proposals
  double forward_seconds = 0.0;    // wall time spent in the forward model

  long length() const { return samples.rows(); }
  double acceptance_rate() const {
    return length() > 1 ? static_cast<double>(accept_count) / (length() - 1) : 0.0;
  }
};

struct ChainOptions {
  double beta = 0.05;      // per-coordinate std of the Gaussian proposal
  long num_samples = 1000;
  std::uint64_t seed = 0;
  Eigen::VectorXd init;    // defaults to the box center
};

/// Random-walk Metropolis-Hastings with symmetric Gaussian proposals.
/// Proposals outside the prior box are rejected without a forward solve.
Chain run_chain(const ForwardModel& model, const Eigen::VectorXd& data, double noise_std,
                const PriorBox& prior, const ChainOptions& opts);

/// Drops the first floor(fraction * N) rows.
Eigen::MatrixXd burn_in(const Eigen::MatrixXd& samples, double fraction);

/// CSV export: iter,accepted,misfit,xi_1,...,xi_d
void write_chain_csv(const std::string& path, const Chain& chain);

}  // namespace ddmc
