#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Dense>

#include "ddmc/fem.hpp"
#include "ddmc/grid.hpp"

namespace ddmc {

/// Squared-exponential kernel hyperparameters. noise_std is the observation
/// noise entering K + noise_std^2 I; it is fixed, never optimized.
struct GPHyper {
  double sigma_f = 1.0;
  double length_scale = 1.0;
  double noise_std = 0.0;
};

struct GPTrainingSet {
  std::vector<double> inputs;  // scalar coordinates
  Eigen::VectorXd targets;

  int size() const { return static_cast<int>(inputs.size()); }
};

/// Trained GP with factorized covariance. Regression is on residuals about
/// the training mean (zero for a single point), so constant data predicts the
/// constant and an empty-ish fit reverts to the data mean far away.
class GPModel {
public:
  GPModel(GPHyper hyper, GPTrainingSet data);

  std::pair<double, double> predict(double s) const;  // (mean, variance >= 0)
  Eigen::VectorXd predict_mean(const std::vector<double>& s) const;
  Eigen::VectorXd predict_variance(const std::vector<double>& s) const;

  const GPHyper& hyper() const { return hyper_; }
  const GPTrainingSet& data() const { return data_; }
  double nugget() const { return nugget_; }
  bool degenerate() const { return degenerate_; }
  void mark_degenerate() { degenerate_ = true; }

private:
  GPHyper hyper_;
  GPTrainingSet data_;
  double ybar_ = 0.0;
  double nugget_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd weights_;  // (K + noise^2 I)^-1 (y - ybar)
  bool degenerate_ = false;
};

/// Negative log marginal likelihood
///   1/2 log det(K + noise^2 I) + 1/2 y^T (K + noise^2 I)^-1 y + n/2 log 2pi
/// evaluated through Cholesky with the same nugget-escalation ladder as the
/// model (1e-10, 1e-8, 1e-6 times sigma_f^2 before FactorizationFailure).
double gp_nlml(const GPHyper& hyper, const GPTrainingSet& data);

struct GPFitOptions {
  /// Length-scale search window is [1e-2, 1e1] times this (the interface length).
  double input_scale = 1.0;
  int grid_points = 20;
  int max_refine_evals = 200;
};

struct GPFitResult {
  GPHyper hyper;
  bool degenerate = false;
};

/// Hyperparameter fit: 20x20 log-space grid search followed by Nelder-Mead
/// refinement from the best cell. The returned nlml never exceeds the grid
/// minimum. Constant targets short-circuit to the sigma_f floor of 1e-8 with
/// the degenerate flag set.
GPFitResult fit_hyper(const GPTrainingSet& data, double noise_std,
                      const GPFitOptions& opts = {});

struct SensorDatum {
  Point2 pos;
  double value = 0.0;
};

struct ActiveFitStep {
  int sensor_index = -1;
  double sigma_max = 0.0;
};

struct ActiveFitResult {
  GPModel model;
  std::vector<ActiveFitStep> history;  // one entry per fit, in order
  std::vector<int> training_sensors;
  double sigma_max = 0.0;
  bool pool_exhausted = false;
};

/// Variance-driven training-set growth for one interface. Starts from the
/// sensor nearest the interface midpoint, then repeatedly adds the unused
/// sensor nearest (2D Euclidean) to the max-variance test point until
/// sigma_max < delta_tol or the pool runs out (flagged, not fatal).
/// GP inputs are arclength coordinates along the interface; test_s likewise.
ActiveFitResult active_fit(const EdgeSegment& interface,
                           const std::vector<SensorDatum>& sensors,
                           const std::vector<double>& test_s, double delta_tol,
                           double gp_noise_std, const GPFitOptions& opts = {});

}  // namespace ddmc
