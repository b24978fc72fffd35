#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddmc/fem.hpp"
#include "ddmc/field_model.hpp"
#include "ddmc/gp.hpp"
#include "ddmc/kl.hpp"
#include "ddmc/mcmc.hpp"

namespace ddmc {

/// Observed data over the global domain.
struct SensorDataSet {
  std::vector<SensorDatum> sensors;
  std::vector<Point2> positions() const;
  Eigen::VectorXd values() const;
};

/// Closure rule split: sensor s goes to every subdomain whose closure
/// contains it, so interface sensors appear in both neighbours.
std::vector<std::vector<int>> split_data(const SensorDataSet& data, const Partition& partition);

/// Everything immutable shared by the DD pipeline for one problem instance.
struct DdProblem {
  Grid2D global_grid;
  Partition partition;
  CovarianceSpec cov;
  double delta_kl = 0.95;
  SourceField source;
  std::vector<Grid2D> local_grids;
  std::unique_ptr<KLBasis> global_basis;
  std::vector<KLBasis> local_bases;

  /// Exterior boundary of the global problem: homogeneous Dirichlet left and
  /// right, homogeneous Neumann top and bottom.
  BoundarySpec global_bc() const;

  DdProblem(Grid2D grid, Partition part, CovarianceSpec cov_spec, double delta,
            SourceField src, const std::vector<int>& local_nx,
            const std::vector<int>& local_ny);
};

/// Local grid resolution compatible with the global grid: nodes of the
/// subdomain grid coincide with global grid lines.
std::vector<int> strip_node_counts(const Grid2D& global_grid, const Partition& partition);

struct InterfaceFit {
  int interface_index = -1;
  ActiveFitResult fit;
  std::vector<double> node_s;          // arclength of interface grid nodes
  Eigen::VectorXd mean_on_nodes;       // GP posterior mean on those nodes
};

/// Runs the adaptive GP procedure on every interface of the partition.
/// The test set of an interface is its local-grid node set.
std::vector<InterfaceFit> fit_interfaces(const DdProblem& problem, const SensorDataSet& data,
                                         double delta_tol, double gp_noise_std);

/// Forward model for one subdomain: local KL field with GP-mean (or given
/// nodal) interface Dirichlet data, observed at the subdomain's sensors.
/// Mode values at the solver's Gauss points are precomputed once.
class LocalForward {
public:
  LocalForward(const DdProblem& problem, int subdomain,
               const std::vector<InterfaceFit>& interfaces,
               const std::vector<SensorDatum>& sensors, const std::vector<int>& sensor_ids);

  /// Interface data override (exact traces instead of GP means); used by the
  /// consistency paths. Nodal values ordered like restrict_solution output.
  LocalForward(const DdProblem& problem, int subdomain,
               const std::vector<std::pair<int, Eigen::VectorXd>>& interface_nodal,
               const std::vector<SensorDatum>& sensors, const std::vector<int>& sensor_ids);

  ForwardModel model();
  int subdomain() const { return subdomain_; }
  const std::vector<int>& sensor_ids() const { return sensor_ids_; }
  Eigen::VectorXd local_data() const;
  long clamp_count() const { return clamp_count_; }
  DiffusionSolver& solver() { return *solver_; }

  /// Full local solve (not just observations) for a coefficient vector.
  FemSolution solve_field(const Eigen::VectorXd& xi);

private:
  void init(const DdProblem& problem,
            const std::vector<std::pair<int, Eigen::VectorXd>>& interface_nodal);

  const DdProblem* problem_ = nullptr;
  int subdomain_ = 0;
  std::vector<SensorDatum> sensors_;
  std::vector<int> sensor_ids_;
  std::unique_ptr<DiffusionSolver> solver_;
  Eigen::MatrixXd modes_at_gauss_;   // (#gauss x d_i), sqrt(lambda) folded in
  Eigen::VectorXd mean_at_gauss_;
  long clamp_count_ = 0;
};

/// Permeability floor applied before any FEM solve; undershoots of the
/// truncated uniform-prior expansion are clamped here and counted.
constexpr double kPermeabilityFloor = 1e-6;

struct McmcSettings {
  long num_samples = 10000;
  double beta = 0.05;
  double burn_in_fraction = 0.1;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct DdMcmcResult {
  std::vector<Chain> chains;                 // per subdomain
  std::vector<InterfaceFit> interface_fits;
  Eigen::MatrixXd assembled;                 // kept x d global coefficients
  std::vector<Eigen::MatrixXd> local_kept;   // post burn-in local rows
  std::vector<long> clamp_counts;
  std::vector<StageTiming> timings;
  long local_forward_evals = 0;
  double local_forward_seconds = 0.0;
  std::string failed_stage;                  // empty on success
};

/// Algorithm: global eigenpairs + partition and local eigenpairs are in
/// `problem`; this runs the data split, per-interface active GP fits, local
/// chains (concurrently, one RNG stream per subdomain) and the projection
/// assembly of post-burn-in rows.
DdMcmcResult run_dd_mcmc(const DdProblem& problem, const SensorDataSet& data,
                         double noise_std, const McmcSettings& mcmc, double gp_delta_tol,
                         std::uint64_t master_seed);

struct CostReport {
  long local_solves_nominal = 0;   // N * M
  long global_solves_nominal = 0;  // N_g
  long local_solves_actual = 0;
  long global_solves_actual = 0;
  double local_seconds_per_solve = 0.0;   // single-threaded calibration
  double global_seconds_per_solve = 0.0;
  double measured_ratio = 0.0;
  double dd_cost_units = 0.0;      // N*M local units
  double gmcmc_cost_units = 0.0;   // N_g * measured_ratio
};

/// Apples-to-apples per-solve timing: repeated single-threaded forward
/// evaluations of one local model and the global model at the prior mean.
CostReport cost_report(const DdMcmcResult& dd, long n_dd, int m, long n_global,
                       long global_evals_actual, LocalForward& local, ForwardModel& global_fwd,
                       int calibration_reps = 25);

}  // namespace ddmc
