#include <doctest.h>

#include "ddsc/errors.hpp"
#include "ddsc/fixtures.hpp"
#include "ddsc/plant.hpp"

using namespace ddsc;

namespace {
Vector scalar(double v) { return Vector::Constant(1, v); }

SwitchedSystem scalar_system() {
  Mode m{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.5)};
  return SwitchedSystem({m});
}
}  // namespace

TEST_CASE("step: zero state, zero input, zero disturbance") {
  auto sys = scalar_system();
  SwitchingSchedule sched({0}, {0});
  auto dist = DisturbanceModel::zero(1);
  auto r = step(sys, sched, dist, {0, scalar(0.0)}, scalar(0.0));
  CHECK(r.next.x.norm() == 0.0);
  CHECK(r.next.k == 1);
}

TEST_CASE("step reproduces the printed counterexample transitions") {
  auto sys = scalar_system();
  SwitchingSchedule sched({0}, {0});
  // Noise free: x+ = 1 + (1/2)(-3/2) = 1/4.
  auto r = step(sys, sched, DisturbanceModel::zero(1), {0, scalar(1.0)}, scalar(-1.5));
  CHECK(r.next.x(0) == doctest::Approx(0.25));
  // With the disturbance value consistent with the printed noisy state x(1) = 1/2.
  auto dist = DisturbanceModel::fixed_sequence({scalar(0.25)}, 0.25);
  r = step(sys, sched, dist, {0, scalar(1.0)}, scalar(-1.5));
  CHECK(r.next.x(0) == doctest::Approx(0.5));
  CHECK(r.disturbance(0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(step(sys, sched, dist, {0, scalar(1.0)}, Vector::Zero(2)), DimensionError);
}

TEST_CASE("active_mode is piecewise constant with left-closed segments") {
  SwitchingSchedule single({0}, {0});
  CHECK(single.active_mode(0) == 0);
  CHECK(single.active_mode(1000) == 0);

  SwitchingSchedule sched({0, 80}, {0, 1});
  CHECK(sched.active_mode(79) == 0);
  CHECK(sched.active_mode(80) == 1);
  CHECK_THROWS_AS(sched.active_mode(-1), ConfigError);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(SwitchingSchedule({1, 5}, {0, 1}), ConfigError);   // must start at 0
  CHECK_THROWS_AS(SwitchingSchedule({0, 0}, {0, 1}), ConfigError);   // strictly increasing
  CHECK_THROWS_AS(SwitchingSchedule({0, 5}, {1, 1}), ConfigError);   // distinct neighbors
  SwitchingSchedule sched({0, 15, 40}, {0, 1, 0});
  CHECK(sched.dwell_time() == 15);
  CHECK(sched.validate_dwell(14) == SwitchingSchedule::DwellStatus::Ok);
  CHECK(sched.validate_dwell(15) == SwitchingSchedule::DwellStatus::WarnEqual);
  CHECK(sched.validate_dwell(16) == SwitchingSchedule::DwellStatus::Violation);
}

TEST_CASE("disturbance models") {
  SUBCASE("zero bound gives the zero vector") {
    auto dist = DisturbanceModel::uniform_ball(3, 0.0, 5);
    CHECK(dist.sample(12).norm() == 0.0);
  }
  SUBCASE("fixed sequence replays in order, cyclically") {
    std::vector<Vector> seq{scalar(0.25), scalar(1.0 / 8), scalar(5.0 / 48), scalar(1.0 / 12)};
    auto dist = DisturbanceModel::fixed_sequence(seq, 0.25);
    for (int k = 0; k < 8; ++k) {
      CHECK(dist.sample(k)(0) == doctest::Approx(seq[static_cast<std::size_t>(k % 4)](0)));
    }
    CHECK_THROWS_AS(DisturbanceModel::fixed_sequence(seq, 0.01), ConfigError);
  }
  SUBCASE("uniform ball: bounded, deterministic, nearly tight") {
    const double bound = 0.4;
    auto dist = DisturbanceModel::uniform_ball(3, bound, 99);
    double max_norm = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double n = dist.sample(k).norm();
      CHECK(n <= bound + 1e-12);
      max_norm = std::max(max_norm, n);
    }
    CHECK(max_norm >= 0.9 * bound);
    CHECK((dist.sample(77) - dist.sample(77)).norm() == 0.0);
  }
}

TEST_CASE("controllability is validated at construction") {
  Mode bad;
  bad.a = Matrix::Zero(2, 2);
  bad.a(0, 0) = 0.5;
  bad.a(1, 1) = 0.5;
  bad.b = Matrix::Zero(2, 1);
  bad.b(0, 0) = 1.0;  // second state unreachable
  CHECK_THROWS_AS(SwitchedSystem({bad}), ConfigError);
}

TEST_CASE("fault schedule reproduces the printed regimes") {
  const auto cfg = fixtures::engine();
  REQUIRE(cfg.fault.has_value());
  FaultSchedule faults(cfg.fault->a, cfg.fault->b, cfg.fault->d, cfg.fault->beta_segments,
                       cfg.fault->actuator_segments);
  SUBCASE("no fault means the nominal pair") {
    FaultSchedule nominal(cfg.fault->a, cfg.fault->b, cfg.fault->d,
                          {{0, std::nullopt, 0.0}},
                          {{0, std::nullopt, Vector::Ones(2)}});
    const Mode m = nominal.effective(123);
    CHECK((m.a - cfg.fault->a).norm() == 0.0);
    CHECK((m.b - cfg.fault->b).norm() == 0.0);
  }
  SUBCASE("k = 30: reduced drift fault, first actuator only") {
    const Mode m = faults.effective(30);
    CHECK((m.a - (cfg.fault->a + 0.05 * cfg.fault->d)).norm() == 0.0);
    CHECK(m.b.col(0) == cfg.fault->b.col(0));
    CHECK(m.b.col(1).norm() == 0.0);
  }
  SUBCASE("k = 100: nominal drift, second actuator only") {
    const Mode m = faults.effective(100);
    CHECK((m.a - cfg.fault->a).norm() == 0.0);
    CHECK(m.b.col(0).norm() == 0.0);
    CHECK(m.b.col(1) == cfg.fault->b.col(1));
  }
  SUBCASE("regime enumeration and boundaries") {
    CHECK(faults.regimes().size() == 4);
    CHECK(faults.regime_boundaries() == std::vector<std::int64_t>{27, 52, 95});
    CHECK(faults.regime_index(0) == 0);
    CHECK(faults.regime_index(52) == 2);
    CHECK(faults.regime_index(200) == 3);
  }
  SUBCASE("overlapping segments are rejected") {
    auto beta = cfg.fault->beta_segments;
    beta[1].from = 20;  // overlaps [0, 27)
    CHECK_THROWS_AS(FaultSchedule(cfg.fault->a, cfg.fault->b, cfg.fault->d, beta,
                                  cfg.fault->actuator_segments),
                    ConfigError);
  }
}

TEST_CASE("identical seeds give bit-identical trajectories") {
  const auto cfg = fixtures::flight();
  SwitchedSystem sys(cfg.modes);
  SwitchingSchedule sched(cfg.switch_times, cfg.switch_modes);
  auto dist = DisturbanceModel::uniform_ball(2, 0.03, 42);
  Vector x0(2);
  x0 << 1.0, -0.5;
  auto run = [&]() {
    PlantState st{0, x0};
    std::vector<Vector> xs;
    for (int k = 0; k < 40; ++k) {
      auto r = step(sys, sched, dist, st, Vector::Zero(2));
      st = r.next;
      xs.push_back(st.x);
    }
    return xs;
  };
  const auto a = run();
  const auto b = run();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);
}

TEST_CASE("offline trajectory: bounded inputs, recorded disturbances, correct length") {
  const auto cfg = fixtures::flight();
  auto dist = DisturbanceModel::uniform_ball(2, 0.03, 3);
  Vector x0(2);
  x0 << 1.0, 1.0;
  const auto traj = generate_offline_trajectory({cfg.modes[0].a, cfg.modes[0].b}, dist, x0, 15,
                                                0.3, 11);
  CHECK(traj.inputs.size() == 15);
  CHECK(traj.states.size() == 16);
  CHECK(traj.disturbances.size() == 15);
  for (const auto& u : traj.inputs) {
    CHECK(u.cwiseAbs().maxCoeff() <= 0.3);
  }
  for (const auto& d : traj.disturbances) CHECK(d.norm() <= 0.03 + 1e-12);
  // Deterministic in the seed.
  const auto again = generate_offline_trajectory({cfg.modes[0].a, cfg.modes[0].b}, dist, x0, 15,
                                                 0.3, 11);
  CHECK((traj.states.back() - again.states.back()).norm() == 0.0);
}
