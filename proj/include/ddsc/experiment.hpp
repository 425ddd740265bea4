#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddsc/analysis.hpp"
#include "ddsc/plant.hpp"
#include "ddsc/supervisor.hpp"

namespace ddsc {

/// Declarative description of one closed-loop run. Loaded from JSON
/// (schema documented in the README) or built programmatically.
struct ExperimentConfig {
  std::string name;

  // Exactly one plant description: a mode set with a switching schedule, or a
  // nominal system with a fault schedule.
  std::vector<Mode> modes;
  std::vector<std::int64_t> switch_times;
  std::vector<int> switch_modes;
  struct FaultSpec {
    Matrix a, b, d;
    std::vector<FaultSchedule::BetaSegment> beta_segments;
    std::vector<FaultSchedule::ActuatorSegment> actuator_segments;
  };
  std::optional<FaultSpec> fault;

  struct DisturbanceSpec {
    std::string kind = "zero";  // zero | uniform_ball | fixed_sequence
    double bound = 0.0;
    std::uint64_t seed = 0;
    std::vector<Vector> sequence;
  } disturbance;

  struct SupervisorSpec {
    double lambda0 = 0.945;
    double delta_v = 0.05;
    double delta_eps = 0.3;
    std::optional<double> delta_x;
    double alpha = 1.0;
    std::optional<int> t;  // defaults to 2N - 1
    double pe_target = 0.0;
    std::uint64_t excitation_seed = 0;
  } supervisor;

  std::int64_t horizon = 0;

  struct OfflineSpec {
    int mode = 0;
    double input_range = 0.3;
    std::optional<int> length;  // defaults to T
    std::uint64_t seed = 1;
    Vector x_start;
  } offline;

  struct AnalysisSpec {
    bool enabled = true;
    bool bounds_enabled = true;
    double eta2 = 2.0;
    double rho = 1.0;
    double beta = 1.0;
    std::optional<double> phi;
    std::optional<double> mu_rate;
    std::optional<double> bounds_delta_x;
    double isps_ball_radius = 0.0;
  } analysis;

  std::string out_dir = "out";

  /// Resolved plant view.
  Plant build_plant() const;
  DisturbanceModel build_disturbance(int n_x) const;
  /// Supervisor configuration with N and T resolved from the plant dimensions.
  SupervisorConfig resolve_supervisor() const;
  /// Shape/consistency validation; throws ConfigError. Returns warnings
  /// (dwell-time checks and other non-fatal findings).
  std::vector<std::string> validate() const;
};

ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json_text(const std::string& text, const std::string& origin);
/// FNV-1a hash of the canonical serialized configuration.
std::string config_hash(const ExperimentConfig& cfg);

struct TrajectoryLog {
  std::vector<StepRecord> steps;  // horizon + 1 records
  std::vector<EventRecord> events;
  std::vector<std::int64_t> true_switches;
  std::vector<std::string> warnings;
  Matrix offline_w;
  SupervisorConfig sup_cfg;
  std::string cfg_hash;
  std::string version;
  int sdp_solves = 0;
  int sdp_optimal = 0;
  int sdp_infeasible = 0;
  int sdp_failures = 0;
};

/// Offline warm start followed by the closed-loop horizon. Deterministic in
/// the configured seeds. Solver failures inside the loop are logged, never
/// fatal; a failed warm start throws WarmStartError.
TrajectoryLog run_experiment(const ExperimentConfig& cfg,
                             const SolverBackend& backend = default_backend(),
                             const SolveObserver& observer = nullptr);

/// Analysis products of a completed run (fields empty when disabled or not
/// computable; the reasons are appended to warnings).
struct RunSummary {
  std::optional<IspsReport> isps;
  std::optional<BoundReport> bounds;
  std::optional<Lemma5Report> lemma5;
  std::vector<std::string> warnings;
};
RunSummary summarize(const TrajectoryLog& log, const ExperimentConfig& cfg,
                     const SolverBackend& backend = default_backend());

/// Writes trajectory.csv, summary.json and the three SVG plots into out_dir.
/// Returns the list of files written.
std::vector<std::string> emit_outputs(const TrajectoryLog& log, const RunSummary& summary,
                                      const ExperimentConfig& cfg, const std::string& out_dir);

std::string trajectory_csv(const TrajectoryLog& log);
/// Parses a trajectory.csv body back into records (x/u/mode/phase/... columns).
std::vector<StepRecord> parse_trajectory_csv(const std::string& csv);
std::string summary_json(const TrajectoryLog& log, const RunSummary& summary,
                         const ExperimentConfig& cfg);

}  // namespace ddsc
