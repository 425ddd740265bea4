#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddsc/matrix.hpp"

namespace ddsc {

/// One linear mode (A, B) of the switched plant.
struct Mode {
  Matrix a;  // n_x x n_x
  Matrix b;  // n_x x n_u
};

/// Ground-truth switched plant: a finite collection of controllable modes.
/// Hidden from the controller path; only the simulator and the analysis side see it.
class SwitchedSystem {
 public:
  /// Validates shape consistency and per-mode controllability
  /// (rank of [B, AB, ..., A^(n_x-1) B] against the shared rank threshold).
  explicit SwitchedSystem(std::vector<Mode> modes);

  int n_x() const { return n_x_; }
  int n_u() const { return n_u_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }
  const Mode& mode(int i) const { return modes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Mode>& modes() const { return modes_; }

 private:
  std::vector<Mode> modes_;
  int n_x_ = 0;
  int n_u_ = 0;
};

/// Piecewise-constant switching signal. switch_times[0] == 0; mode_at[j] is the
/// (0-based) mode active on [switch_times[j], switch_times[j+1]).
class SwitchingSchedule {
 public:
  SwitchingSchedule(std::vector<std::int64_t> switch_times, std::vector<int> modes);

  int active_mode(std::int64_t k) const;
  std::int64_t dwell_time() const;
  const std::vector<std::int64_t>& switch_times() const { return switch_times_; }
  const std::vector<int>& segment_modes() const { return modes_; }

  /// Switch instants strictly after time 0 (the k_{s_j}, j >= 1).
  std::vector<std::int64_t> switches_after_start() const;

  enum class DwellStatus { Ok, WarnEqual, Violation };
  /// Assumption check tau > T: equality warns rather than errors.
  DwellStatus validate_dwell(std::int64_t window_length) const;

 private:
  std::vector<std::int64_t> switch_times_;
  std::vector<int> modes_;
};

/// Norm-bounded disturbance source, deterministic in (seed, k).
class DisturbanceModel {
 public:
  enum class Kind { Zero, UniformBall, FixedSequence };

  static DisturbanceModel zero(int dim);
  static DisturbanceModel uniform_ball(int dim, double bound, std::uint64_t seed);
  /// Entries are replayed cyclically; every entry must satisfy ||d|| <= bound.
  static DisturbanceModel fixed_sequence(std::vector<Vector> seq, double bound);

  Vector sample(std::int64_t k) const;
  double bound() const { return bound_; }
  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

 private:
  DisturbanceModel() = default;
  Kind kind_ = Kind::Zero;
  int dim_ = 0;
  double bound_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<Vector> seq_;
};

struct PlantState {
  std::int64_t k = 0;
  Vector x;
};

struct StepResult {
  PlantState next;
  Vector disturbance;  // the drawn d(k), recorded for analysis-side use
  int mode = 0;        // ground-truth active mode at time k
};

/// One step of x(k+1) = A_sigma(k) x(k) + B_sigma(k) u(k) + d(k).
StepResult step(const SwitchedSystem& sys, const SwitchingSchedule& sched,
                const DisturbanceModel& dist, const PlantState& st, const Vector& u);

/// Time-indexed fault view over a nominal (A, B): A~(k) = A + beta(k) D and
/// B~(k) = B diag(alpha(k)). Segments must partition [0, inf) without overlap.
class FaultSchedule {
 public:
  struct BetaSegment {
    std::int64_t from = 0;
    std::optional<std::int64_t> to;  // exclusive; empty = open-ended
    double beta = 0.0;
  };
  struct ActuatorSegment {
    std::int64_t from = 0;
    std::optional<std::int64_t> to;
    Vector alpha;  // diagonal actuator mask, length n_u
  };

  FaultSchedule(Matrix base_a, Matrix base_b, Matrix d,
                std::vector<BetaSegment> beta_segments,
                std::vector<ActuatorSegment> actuator_segments);

  int n_x() const { return static_cast<int>(base_a_.rows()); }
  int n_u() const { return static_cast<int>(base_b_.cols()); }

  Mode effective(std::int64_t k) const;

  /// Distinct (A~, B~) regimes in time order, with the boundaries between them.
  /// regime_index(k) indexes into regimes().
  const std::vector<Mode>& regimes() const { return regimes_; }
  int regime_index(std::int64_t k) const;
  /// Times > 0 at which the effective regime changes.
  const std::vector<std::int64_t>& regime_boundaries() const { return boundaries_; }

 private:
  double beta_at(std::int64_t k) const;
  Vector alpha_at(std::int64_t k) const;

  Matrix base_a_, base_b_, d_;
  std::vector<BetaSegment> beta_segments_;
  std::vector<ActuatorSegment> actuator_segments_;
  std::vector<Mode> regimes_;
  std::vector<std::int64_t> boundaries_;  // regime i active on [boundary_{i-1}, boundary_i)
};

/// Uniform view over the two plant representations used by the experiment loop.
class Plant {
 public:
  Plant(SwitchedSystem sys, SwitchingSchedule sched);
  explicit Plant(FaultSchedule faults);

  int n_x() const;
  int n_u() const;
  Mode matrices_at(std::int64_t k) const;
  int mode_at(std::int64_t k) const;
  /// Ground-truth switch instants after time 0.
  std::vector<std::int64_t> switch_times() const;
  /// Realized mode set, in ground-truth index order.
  std::vector<Mode> realized_modes() const;

  StepResult step(const DisturbanceModel& dist, const PlantState& st, const Vector& u) const;

  const SwitchedSystem* switched() const { return sys_ ? &*sys_ : nullptr; }
  const SwitchingSchedule* schedule() const { return sched_ ? &*sched_ : nullptr; }
  const FaultSchedule* faults() const { return faults_ ? &*faults_ : nullptr; }

 private:
  std::optional<SwitchedSystem> sys_;
  std::optional<SwitchingSchedule> sched_;
  std::optional<FaultSchedule> faults_;
};

/// Offline input-state trajectory: inputs u(-T..-1) drawn per-component uniform
/// in [-input_range, input_range], states simulated in the fixed mode active at
/// time 0 with the plant's disturbance model at negative times. states has
/// length + 1 entries and ends at the online initial state x(0).
struct OfflineTrajectory {
  std::vector<Vector> inputs;
  std::vector<Vector> states;
  std::vector<Vector> disturbances;
};
OfflineTrajectory generate_offline_trajectory(const Mode& mode, const DisturbanceModel& dist,
                                              const Vector& x_start, Index length,
                                              double input_range, std::uint64_t seed);

}  // namespace ddsc
