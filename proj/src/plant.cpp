#include "ddsc/plant.hpp"

#include <algorithm>

#include "ddsc/errors.hpp"
#include "ddsc/numerics.hpp"
#include "ddsc/rng.hpp"

namespace ddsc {

namespace {

bool controllable(const Matrix& a, const Matrix& b) {
  const Index n = a.rows();
  Matrix ctrb(n, n * b.cols());
  Matrix block = b;
  for (Index i = 0; i < n; ++i) {
    ctrb.middleCols(i * b.cols(), b.cols()) = block;
    block = a * block;
  }
  auto [smin, smax] = numerics::singular_value_range(ctrb);
  // Rank n iff the n-th singular value clears the shared threshold.
  Eigen::JacobiSVD<Matrix> svd(ctrb);
  const auto& s = svd.singularValues();
  (void)smin;
  return s(n - 1) > numerics::rank_tolerance(smax);
}

}  // namespace

SwitchedSystem::SwitchedSystem(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw ConfigError("SwitchedSystem: need at least one mode");
  n_x_ = static_cast<int>(modes_.front().a.rows());
  n_u_ = static_cast<int>(modes_.front().b.cols());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const Mode& m = modes_[i];
    require(m.a.rows() == n_x_ && m.a.cols() == n_x_, "SwitchedSystem: A_" + std::to_string(i) +
                                                          " must be " + std::to_string(n_x_) + "x" +
                                                          std::to_string(n_x_));
    require(m.b.rows() == n_x_ && m.b.cols() == n_u_,
            "SwitchedSystem: B_" + std::to_string(i) + " has inconsistent shape");
    if (!controllable(m.a, m.b)) {
      throw ConfigError("SwitchedSystem: mode " + std::to_string(i) + " is not controllable");
    }
  }
}

SwitchingSchedule::SwitchingSchedule(std::vector<std::int64_t> switch_times, std::vector<int> modes)
    : switch_times_(std::move(switch_times)), modes_(std::move(modes)) {
  if (switch_times_.empty() || switch_times_.front() != 0) {
    throw ConfigError("SwitchingSchedule: switch_times must start at 0");
  }
  if (switch_times_.size() != modes_.size()) {
    throw ConfigError("SwitchingSchedule: one mode per segment required");
  }
  for (std::size_t j = 1; j < switch_times_.size(); ++j) {
    if (switch_times_[j] <= switch_times_[j - 1]) {
      throw ConfigError("SwitchingSchedule: switch times must be strictly increasing");
    }
    if (modes_[j] == modes_[j - 1]) {
      throw ConfigError("SwitchingSchedule: consecutive segments must use distinct modes");
    }
  }
}

int SwitchingSchedule::active_mode(std::int64_t k) const {
  if (k < 0) throw ConfigError("SwitchingSchedule::active_mode: negative time");
  auto it = std::upper_bound(switch_times_.begin(), switch_times_.end(), k);
  return modes_[static_cast<std::size_t>(std::distance(switch_times_.begin(), it)) - 1];
}

std::int64_t SwitchingSchedule::dwell_time() const {
  if (switch_times_.size() < 2) return std::numeric_limits<std::int64_t>::max();
  std::int64_t tau = std::numeric_limits<std::int64_t>::max();
  for (std::size_t j = 1; j < switch_times_.size(); ++j) {
    tau = std::min(tau, switch_times_[j] - switch_times_[j - 1]);
  }
  return tau;
}

std::vector<std::int64_t> SwitchingSchedule::switches_after_start() const {
  return {switch_times_.begin() + 1, switch_times_.end()};
}

SwitchingSchedule::DwellStatus SwitchingSchedule::validate_dwell(std::int64_t window_length) const {
  const std::int64_t tau = dwell_time();
  if (tau > window_length) return DwellStatus::Ok;
  if (tau == window_length) return DwellStatus::WarnEqual;
  return DwellStatus::Violation;
}

DisturbanceModel DisturbanceModel::zero(int dim) {
  DisturbanceModel m;
  m.kind_ = Kind::Zero;
  m.dim_ = dim;
  return m;
}

DisturbanceModel DisturbanceModel::uniform_ball(int dim, double bound, std::uint64_t seed) {
  if (bound < 0.0) throw ConfigError("DisturbanceModel: bound must be >= 0");
  DisturbanceModel m;
  m.kind_ = Kind::UniformBall;
  m.dim_ = dim;
  m.bound_ = bound;
  m.seed_ = seed;
  return m;
}

DisturbanceModel DisturbanceModel::fixed_sequence(std::vector<Vector> seq, double bound) {
  if (seq.empty()) throw ConfigError("DisturbanceModel: fixed sequence must be nonempty");
  for (const auto& d : seq) {
    if (d.norm() > bound + 1e-12) {
      throw ConfigError("DisturbanceModel: fixed-sequence entry exceeds bound");
    }
  }
  DisturbanceModel m;
  m.kind_ = Kind::FixedSequence;
  m.dim_ = static_cast<int>(seq.front().size());
  m.bound_ = bound;
  m.seq_ = std::move(seq);
  return m;
}

Vector DisturbanceModel::sample(std::int64_t k) const {
  switch (kind_) {
    case Kind::Zero:
      return Vector::Zero(dim_);
    case Kind::FixedSequence: {
      const auto n = static_cast<std::int64_t>(seq_.size());
      std::int64_t idx = k % n;
      if (idx < 0) idx += n;
      return seq_[static_cast<std::size_t>(idx)];
    }
    case Kind::UniformBall: {
      if (bound_ == 0.0) return Vector::Zero(dim_);
      Rng rng(mix_seed(seed_, k));
      return rng.uniform_ball(dim_, bound_);
    }
  }
  return Vector::Zero(dim_);
}

StepResult step(const SwitchedSystem& sys, const SwitchingSchedule& sched,
                const DisturbanceModel& dist, const PlantState& st, const Vector& u) {
  require(u.size() == sys.n_u(), "step: input dimension mismatch");
  require(st.x.size() == sys.n_x(), "step: state dimension mismatch");
  const int mode = sched.active_mode(st.k);
  const Mode& m = sys.mode(mode);
  Vector d = dist.sample(st.k);
  StepResult r;
  r.next.k = st.k + 1;
  r.next.x = m.a * st.x + m.b * u + d;
  r.disturbance = std::move(d);
  r.mode = mode;
  return r;
}

namespace {

template <typename Segment>
void check_partition(const std::vector<Segment>& segs, const char* what) {
  if (segs.empty()) throw ConfigError(std::string(what) + ": at least one segment required");
  if (segs.front().from != 0) throw ConfigError(std::string(what) + ": first segment must start at 0");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const bool last = (i + 1 == segs.size());
    if (last) {
      if (segs[i].to.has_value()) {
        throw ConfigError(std::string(what) + ": last segment must be open-ended");
      }
    } else {
      if (!segs[i].to.has_value()) {
        throw ConfigError(std::string(what) + ": only the last segment may be open-ended");
      }
      if (*segs[i].to <= segs[i].from) {
        throw ConfigError(std::string(what) + ": empty segment");
      }
      if (segs[i + 1].from != *segs[i].to) {
        throw ConfigError(std::string(what) + ": segments must partition the horizon without overlap");
      }
    }
  }
}

template <typename Segment>
const Segment& segment_at(const std::vector<Segment>& segs, std::int64_t k) {
  for (const auto& s : segs) {
    if (k >= s.from && (!s.to.has_value() || k < *s.to)) return s;
  }
  throw ConfigError("fault schedule: time before segment start");
}

}  // namespace

FaultSchedule::FaultSchedule(Matrix base_a, Matrix base_b, Matrix d,
                             std::vector<BetaSegment> beta_segments,
                             std::vector<ActuatorSegment> actuator_segments)
    : base_a_(std::move(base_a)),
      base_b_(std::move(base_b)),
      d_(std::move(d)),
      beta_segments_(std::move(beta_segments)),
      actuator_segments_(std::move(actuator_segments)) {
  require(base_a_.rows() == base_a_.cols(), "FaultSchedule: A must be square");
  require(d_.rows() == base_a_.rows() && d_.cols() == base_a_.cols(),
          "FaultSchedule: D must match A");
  require(base_b_.rows() == base_a_.rows(), "FaultSchedule: B row count must match A");
  check_partition(beta_segments_, "FaultSchedule beta");
  check_partition(actuator_segments_, "FaultSchedule actuator");
  for (const auto& s : actuator_segments_) {
    require(s.alpha.size() == base_b_.cols(), "FaultSchedule: actuator mask length != n_u");
  }

  // Enumerate realized regimes in time order by sweeping all segment boundaries.
  std::vector<std::int64_t> cuts{0};
  for (const auto& s : beta_segments_)
    if (s.to) cuts.push_back(*s.to);
  for (const auto& s : actuator_segments_)
    if (s.to) cuts.push_back(*s.to);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    regimes_.push_back(effective(cuts[i]));
    if (i > 0) boundaries_.push_back(cuts[i]);
  }
}

double FaultSchedule::beta_at(std::int64_t k) const {
  return segment_at(beta_segments_, k).beta;
}

Vector FaultSchedule::alpha_at(std::int64_t k) const {
  return segment_at(actuator_segments_, k).alpha;
}

Mode FaultSchedule::effective(std::int64_t k) const {
  if (k < 0) k = 0;  // offline data is generated under the regime active at time 0
  Mode m;
  m.a = base_a_ + beta_at(k) * d_;
  m.b = base_b_ * alpha_at(k).asDiagonal();
  return m;
}

int FaultSchedule::regime_index(std::int64_t k) const {
  if (k < 0) return 0;
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), k);
  return static_cast<int>(std::distance(boundaries_.begin(), it));
}

Plant::Plant(SwitchedSystem sys, SwitchingSchedule sched)
    : sys_(std::move(sys)), sched_(std::move(sched)) {
  for (int m : sched_->segment_modes()) {
    if (m < 0 || m >= sys_->mode_count()) {
      throw ConfigError("Plant: schedule references mode " + std::to_string(m) +
                        " outside the mode set");
    }
  }
}

Plant::Plant(FaultSchedule faults) : faults_(std::move(faults)) {}

int Plant::n_x() const { return sys_ ? sys_->n_x() : faults_->n_x(); }
int Plant::n_u() const { return sys_ ? sys_->n_u() : faults_->n_u(); }

Mode Plant::matrices_at(std::int64_t k) const {
  if (sys_) return sys_->mode(sched_->active_mode(std::max<std::int64_t>(k, 0)));
  return faults_->effective(k);
}

int Plant::mode_at(std::int64_t k) const {
  if (sys_) return sched_->active_mode(std::max<std::int64_t>(k, 0));
  return faults_->regime_index(k);
}

std::vector<std::int64_t> Plant::switch_times() const {
  if (sys_) return sched_->switches_after_start();
  return faults_->regime_boundaries();
}

std::vector<Mode> Plant::realized_modes() const {
  if (sys_) return sys_->modes();
  return faults_->regimes();
}

StepResult Plant::step(const DisturbanceModel& dist, const PlantState& st, const Vector& u) const {
  const Mode m = matrices_at(st.k);
  require(u.size() == m.b.cols(), "Plant::step: input dimension mismatch");
  require(st.x.size() == m.a.rows(), "Plant::step: state dimension mismatch");
  Vector d = dist.sample(st.k);
  StepResult r;
  r.next.k = st.k + 1;
  r.next.x = m.a * st.x + m.b * u + d;
  r.disturbance = std::move(d);
  r.mode = mode_at(st.k);
  return r;
}

OfflineTrajectory generate_offline_trajectory(const Mode& mode, const DisturbanceModel& dist,
                                              const Vector& x_start, Index length,
                                              double input_range, std::uint64_t seed) {
  const Index n_u = mode.b.cols();
  OfflineTrajectory traj;
  traj.states.push_back(x_start);
  Vector x = x_start;
  for (Index i = 0; i < length; ++i) {
    const std::int64_t k = i - length;  // offline samples carry negative indices
    Rng rng(mix_seed(seed, k));
    Vector u(n_u);
    for (Index j = 0; j < n_u; ++j) u(j) = rng.uniform(-input_range, input_range);
    Vector d = dist.sample(k);
    x = mode.a * x + mode.b * u + d;
    traj.inputs.push_back(std::move(u));
    traj.disturbances.push_back(std::move(d));
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace ddsc
