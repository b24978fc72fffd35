#include "ddmc/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ddmc/errors.hpp"
#include "ddmc/rng.hpp"

namespace ddmc {

double log_likelihood(const ForwardModel& model, const Eigen::VectorXd& xi,
                      const Eigen::VectorXd& data, double noise_std) {
  if (noise_std <= 0.0) throw ConfigError("noise_std must be positive");
  const Eigen::VectorXd pred = model.evaluate(xi);
  if (pred.size() != data.size()) {
    throw LengthMismatch("forward output and data lengths differ");
  }
  return -(data - pred).squaredNorm() / (2.0 * noise_std * noise_std);
}

Chain run_chain(const ForwardModel& model, const Eigen::VectorXd& data, double noise_std,
                const PriorBox& prior, const ChainOptions& opts) {
  if (opts.beta <= 0.0) throw ConfigError("beta must be positive");
  if (opts.num_samples < 2) throw ConfigError("chain needs at least 2 samples");
  const int d = model.dim_in;
  Eigen::VectorXd state = opts.init.size() ? opts.init
                                           : Eigen::VectorXd::Constant(d, 0.5 * (prior.lo + prior.hi));
  if (state.size() != d) throw LengthMismatch("init length does not match model dimension");
  if (!prior.contains(state)) throw InitOutsideSupport("initial state violates the prior box");

  const long n = opts.num_samples;
  Chain chain;
  chain.samples.resize(n, d);
  chain.misfit.resize(n);
  chain.accepted.assign(static_cast<std::size_t>(n), 0);
  chain.beta = opts.beta;
  chain.seed = opts.seed;

  Rng rng(opts.seed);
  const double inv_two_var = 1.0 / (2.0 * noise_std * noise_std);
  const auto timed_eval = [&](const Eigen::VectorXd& xi) {
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd out = model.evaluate(xi);
    chain.forward_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++chain.forward_evals;
    return out;
  };

  Eigen::VectorXd pred = timed_eval(state);
  if (pred.size() != data.size()) throw LengthMismatch("forward output and data lengths differ");
  double eta = (data - pred).squaredNorm() * inv_two_var;
  chain.samples.row(0) = state;
  chain.misfit[0] = eta;

  Eigen::VectorXd proposal(d);
  for (long s = 1; s < n; ++s) {
    for (int k = 0; k < d; ++k) proposal[k] = state[k] + opts.beta * rng.normal();
    bool accept = false;
    if (prior.contains(proposal)) {
      const Eigen::VectorXd prop_pred = timed_eval(proposal);
      const double eta_prop = (data - prop_pred).squaredNorm() * inv_two_var;
      // symmetric proposal: log alpha = eta(current) - eta(proposal)
      const double log_u = std::log(rng.uniform01() + 1e-300);
      if (log_u < eta - eta_prop) {
        state = proposal;
        eta = eta_prop;
        accept = true;
      }
    }
    chain.samples.row(s) = state;
    chain.misfit[s] = eta;
    chain.accepted[static_cast<std::size_t>(s)] = accept ? 1 : 0;
    if (accept) ++chain.accept_count;
  }
  return chain;
}

Eigen::MatrixXd burn_in(const Eigen::MatrixXd& samples, double fraction) {
  if (fraction < 0.0 || fraction >= 1.0) throw ConfigError("burn-in fraction must be in [0,1)");
  const long drop = static_cast<long>(std::floor(fraction * samples.rows()));
  return samples.bottomRows(samples.rows() - drop);
}

void write_chain_csv(const std::string& path, const Chain& chain) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "iter,accepted,misfit";
  for (int k = 0; k < chain.samples.cols(); ++k) os << ",xi_" << (k + 1);
  os << "\n";
  char buf[64];
  for (long s = 0; s < chain.length(); ++s) {
    os << (s + 1) << "," << int(chain.accepted[static_cast<std::size_t>(s)]);
    std::snprintf(buf, sizeof(buf), ",%.17g", chain.misfit[s]);
    os << buf;
    for (int k = 0; k < chain.samples.cols(); ++k) {
      std::snprintf(buf, sizeof(buf), ",%.17g", chain.samples(s, k));
      os << buf;
    }
    os << "\n";
  }
}

}  // namespace ddmc
