#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "ddsc/data_window.hpp"
#include "ddsc/matrix.hpp"
#include "ddsc/synthesis.hpp"

namespace ddsc {

/// Tuning of the auxiliary-function switching controller.
struct SupervisorConfig {
  double lambda0 = 0.945;        // decay-detection rate, in (0, 1)
  double delta_v = 0.05;         // dormancy threshold on V(x)
  double delta_eps = 0.3;        // excitation bound ||eps|| <= delta_eps
  std::optional<double> delta_x; // optional explicit dormancy ball on ||x||
  double alpha = 1.0;            // robustness weight of the synthesis program
  int n = 0;                     // excitation window length N
  int t = 0;                     // data window length T >= 2N - 1
  int n_x = 0;
  int n_u = 0;
  std::uint64_t excitation_seed = 0;
  double pe_target = 0.0;        // required PE level of designed excitation

  void validate() const;
};

enum class Phase { Excite, Solve, Hold, Dormant };
const char* to_string(Phase p);

enum class Event { None, StartKj, EndKjSup, DormantEntry, DormantExit };
const char* to_string(Event e);

struct EventRecord {
  std::int64_t k = 0;
  Event event = Event::None;
};

/// Full supervisor state between steps. Value type: control_step returns an
/// updated copy, which keeps seeded runs reproducible and easy to test.
struct SupervisorState {
  Phase phase = Phase::Hold;
  Matrix k_gain;  // n_u x n_x
  Matrix p;       // n_x x n_x
  Matrix q;       // T x n_x
  std::deque<double> v_hist;  // most recent last, at most 3 kept
  std::vector<EventRecord> event_log;
  std::int64_t k = 0;
  std::vector<Vector> excitation;  // pregenerated window, set while exciting
  int excite_emitted = 0;
};

struct ControlDecision {
  Vector u;
  bool solved_sdp = false;
  bool feasible = false;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  Phase phase_after = Phase::Hold;
  Event event = Event::None;
  double aux_value = 0.0;
};

/// Called after every synthesis solve with the data that produced it.
using SolveObserver =
    std::function<void(std::int64_t k, const SdpProblemData&, const SdpSolution&)>;

/// V(x) = x' P x.
double auxiliary_value(const Vector& x, const Matrix& p);

/// Classifies one step from (V(k-2), V(k-1), V(k)). DormantEntry wins whenever
/// v_now <= delta_V (or ||x|| <= delta_x when configured); with fewer than two
/// history values the result is None. Event starts use the strict inequality,
/// so exact equality V(k) = lambda0 V(k-1) does not start an event.
Event detect_event(const std::deque<double>& v_hist, double v_now, double x_norm,
                   const SupervisorConfig& cfg);

/// Draws a norm-bounded excitation window of length N certified
/// persistently exciting of order n_x + 1 at level >= pe_target.
/// Rejection-samples up to 100 attempts; throws ExcitationDesignError with the
/// best achieved level if the target is unreachable.
std::pair<std::vector<Vector>, PeCertificate> generate_excitation(int n_u, int n_x, int n,
                                                                  double delta_eps,
                                                                  double pe_target,
                                                                  std::uint64_t seed);

/// Solves the synthesis program on the offline window and returns the initial
/// supervisor state (phase Hold, k = 0). Throws WarmStartError when the
/// offline program is not solvable.
SupervisorState warm_start(const DataTriple& offline_triple, const SupervisorConfig& cfg,
                           const SolverBackend& backend = default_backend(),
                           const SolveObserver& observer = nullptr);

/// Advances the phase machine by one step and produces the control input for
/// time st.k. The caller applies u to the plant and pushes the observed sample
/// into the window before the next call.
std::pair<ControlDecision, SupervisorState> control_step(
    const SupervisorState& st, const Vector& x, const DataWindow& window,
    const SupervisorConfig& cfg, const SolverBackend& backend = default_backend(),
    const SolveObserver& observer = nullptr);

}  // namespace ddsc
