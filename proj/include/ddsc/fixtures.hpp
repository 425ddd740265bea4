#pragma once

#include "ddsc/experiment.hpp"

namespace ddsc::fixtures {

/// Two-mode longitudinal flight model with a switch at k = 80;
/// T = 15, d_bar = 0.03, delta_V = 0.05, alpha = 1, lambda0 = 0.945.
ExperimentConfig flight();

/// Variant of the flight fixture for the switching-time alignment check:
/// the disturbance bound is reduced to d_bar (below the computed delta_d2)
/// and the dormancy threshold is lowered so the run is not dormant when the
/// switch happens, as the alignment result presumes.
ExperimentConfig flight_timing(double d_bar);

/// Three-state engine model under the pinned system/actuator fault schedule;
/// T = 21, d_bar = 0.015, delta_eps = 0.01, delta_x = 1e-4, alpha = 0.2.
ExperimentConfig engine();

/// The printed scalar counterexample data: (A, B) = (1, 1/2), T = 5.
struct Remark1Data {
  std::vector<double> u_noise_free;
  std::vector<double> x_noise_free;
  std::vector<double> u_noisy;
  std::vector<double> x_noisy;
  /// Disturbance values consistent with the printed noisy states
  /// (the first differs from the loosely quoted value; replaying these
  /// reproduces the printed trajectory exactly).
  std::vector<double> d_noisy;

  Matrix w_noise_free() const;  // 2 x 5, rank 2
  Matrix w_noisy() const;       // 2 x 5, rank 1
  /// Data triples with the sixth state simulated from the recursion
  /// (disturbance replayed cyclically for the noisy case).
  DataTriple triple_noise_free() const;
  DataTriple triple_noisy() const;
};
Remark1Data remark1();

struct Remark1Summary {
  double noise_free_margin = 0.0;
  bool noise_free_rank_ok = false;
  double noisy_margin = 0.0;
  bool noisy_rank_ok = false;
  SolveStatus noisy_status = SolveStatus::NumericalFailure;
  SolveStatus noise_free_status = SolveStatus::NumericalFailure;
};
/// Replays both printed windows and attempts the synthesis program on each.
Remark1Summary run_remark1(const SolverBackend& backend = default_backend());
std::string remark1_summary_json(const Remark1Summary& s);

}  // namespace ddsc::fixtures
