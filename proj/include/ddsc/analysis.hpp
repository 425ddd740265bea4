#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddsc/matrix.hpp"
#include "ddsc/plant.hpp"
#include "ddsc/supervisor.hpp"

namespace ddsc {

/// One logged simulation step. Produced by the experiment runner and consumed
/// by the analysis-side checks.
struct StepRecord {
  std::int64_t k = 0;
  Vector x;
  Vector u;
  int mode = 0;  // ground truth
  Phase phase = Phase::Hold;
  Event event = Event::None;
  double aux_value = 0.0;
  double w_sigma_min = 0.0;
  bool solved = false;
  bool feasible = false;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double gain_norm = 0.0;  // ||K(k)|| held after the step
  Vector disturbance;
};

/// Analysis-side model knowledge: true mode matrices, per-mode stabilizing
/// gains and the constants entering the theoretical bounds. Gains and the
/// per-mode optimal values gamma_bar are obtained from one noise-free per-mode
/// simulation plus the disturbance-compensated synthesis program.
struct ModelSideInfo {
  std::vector<Mode> modes;
  std::vector<Matrix> gains;       // K_i
  std::vector<double> beta;        // beta_i > 0
  std::vector<double> gamma_bar;   // per-mode ideal optimal values
  std::vector<Matrix> p_bar;       // per-mode ideal P solutions
  int t = 0;
  int n_x = 0;
  int n_u = 0;
  double eta2 = 2.0;
  double w_hat = 0.0;              // data-side PE floor w_bar * rho / sqrt(n_x + 1)
  double rho = 1.0;                // opaque internal parameter, configured
  std::optional<double> phi;      // bound on ||Phi_bar||^2 ||P_bar||; derived when unset
  std::optional<double> mu_rate;  // convergence-rate constant; midpoint default
  Matrix offline_w;                // offline window [U; X] for the condition number
};

/// Builds ModelSideInfo by solving the per-mode noise-free programs.
/// Throws ConfigError when a mode cannot be stabilized this way.
ModelSideInfo make_model_side_info(const std::vector<Mode>& modes, int t, double eta2,
                                   double w_bar, double rho, std::optional<double> phi,
                                   std::optional<double> mu_rate, double beta_value,
                                   const Matrix& offline_w, std::uint64_t seed = 71,
                                   const SolverBackend& backend = default_backend());

/// Per-mode quadratic Lyapunov certificates with shared eigenvalue envelope.
struct LyapunovFamily {
  std::vector<Matrix> p;
  double lambda_min = 0.0;  // min over modes of lambda_min(P_i)
  double lambda_max = 0.0;  // max over modes of lambda_max(P_i)
};

LyapunovFamily compute_lyapunov_family(const ModelSideInfo& info);

/// Worst-case norm bound on the block lower-triangular disturbance-propagation
/// matrix over all length-T mode sequences.
double compute_omega_bound(const ModelSideInfo& info);

struct BoundReport {
  double omega_bar = 0.0;
  double xi_bar = 0.0;
  double w_hat = 0.0;
  double cond_w = 0.0;
  double phi = 0.0;
  double delta_d1 = 0.0;
  double delta_d2 = 0.0;
  double lambda_check = 0.0;  // smallest admissible decay-detection rate
  double delta_k = 0.0;       // uniform gain bound
  double c0 = 0.0;
  double c1 = 0.0;
  double c = 0.0;
  double phi0 = 0.0;
  double lambda_tilde0 = 0.0;
  double mu_rate = 0.0;
  double tau_bar = 0.0;       // minimum dwell time for the convergence argument
  double max_eta_gamma = 0.0;
};

/// Evaluates every bound formula from the model-side constants. Requires
/// cfg.delta_x (the x-ball radius equivalent of the dormancy threshold).
BoundReport compute_bounds(const ModelSideInfo& info, const LyapunovFamily& fam,
                           const SupervisorConfig& cfg);

/// Alignment of detected events with the ground-truth switching times:
/// a start near k_s and the following end near k_s + T, both within +-1 step.
struct Lemma5Row {
  std::int64_t switch_time = 0;
  std::optional<std::int64_t> detected_start;
  std::optional<std::int64_t> detected_end;
  bool start_aligned = false;
  bool end_aligned = false;
};

struct Lemma5Report {
  std::vector<Lemma5Row> rows;
  bool all_aligned = true;  // vacuously true without switches
};

Lemma5Report lemma5_timing_check(const std::vector<EventRecord>& event_log,
                                 const std::vector<std::int64_t>& switch_times, int t);

struct IspsReport {
  std::vector<double> segment_peaks;
  double fitted_decay_rate = 0.0;  // per-step envelope rate over decaying segments
  double fit_residual = 0.0;       // pooled RMS residual of the log-linear fit
  double offset = 0.0;             // practical floor: median ||x|| inside the ball
  double c0 = 0.0;                 // offset + ball radius
  std::optional<std::int64_t> entered_ball_at;
  bool bounded = false;
  bool reentered_after_escapes = false;
  bool verdict = false;
};

/// Empirical practical-stability check: the trajectory must stay bounded,
/// reach the ||x|| <= delta_x ball in finite time, return to it after every
/// escape, and admit a decaying log-linear envelope outside the ball.
IspsReport check_isps(const std::vector<StepRecord>& trajectory, double d_bar, double delta_x);

}  // namespace ddsc
