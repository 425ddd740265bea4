#include <doctest.h>

#include "ddsc/errors.hpp"
#include "ddsc/fixtures.hpp"
#include "ddsc/plant.hpp"
#include "ddsc/numerics.hpp"
#include "ddsc/supervisor.hpp"
#include "oracles.hpp"

using namespace ddsc;

namespace {

SupervisorConfig flight_sup_cfg() {
  const auto cfg = fixtures::flight();
  SupervisorConfig sup;
  sup.lambda0 = cfg.supervisor.lambda0;
  sup.delta_v = cfg.supervisor.delta_v;
  sup.delta_eps = cfg.supervisor.delta_eps;
  sup.alpha = cfg.supervisor.alpha;
  sup.n = 8;
  sup.t = 15;
  sup.n_x = 2;
  sup.n_u = 2;
  sup.excitation_seed = cfg.supervisor.excitation_seed;
  sup.pe_target = cfg.supervisor.pe_target;
  return sup;
}

DataTriple flight_offline_triple(DataWindow* out_window = nullptr) {
  const auto cfg = fixtures::flight();
  DisturbanceModel dist =
      DisturbanceModel::uniform_ball(2, cfg.disturbance.bound, cfg.disturbance.seed);
  const auto traj = generate_offline_trajectory({cfg.modes[0].a, cfg.modes[0].b}, dist,
                                                cfg.offline.x_start, 15, 0.3, cfg.offline.seed);
  DataWindow w(15, traj.states.front());
  for (std::size_t i = 0; i < traj.inputs.size(); ++i) w.push(traj.inputs[i], traj.states[i + 1]);
  if (out_window != nullptr) *out_window = w;
  return w.snapshot();
}

}  // namespace

TEST_CASE("auxiliary_value") {
  CHECK(auxiliary_value(Vector::Zero(3), Matrix::Identity(3, 3)) == doctest::Approx(0.0));
  Vector x(2);
  x << 3.0, 4.0;
  CHECK(auxiliary_value(x, Matrix::Identity(2, 2)) == doctest::Approx(25.0));
  Matrix p(2, 2);
  p << 2.0, 0.5, 0.5, 1.0;
  CHECK(auxiliary_value(x, p) == doctest::Approx(oracles::quadratic_form(x, p)).epsilon(1e-14));
  CHECK_THROWS_AS(auxiliary_value(x, Matrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("detect_event classification") {
  SupervisorConfig cfg = flight_sup_cfg();
  cfg.lambda0 = 0.945;
  cfg.delta_v = 0.05;
  const double far = 10.0;  // ||x|| held away from any delta_x test

  SUBCASE("growth after decay starts an event window") {
    std::deque<double> hist{10.0, 9.0};
    CHECK(detect_event(hist, 8.9, far, cfg) == Event::StartKj);
  }
  SUBCASE("decay after growth ends the solving window") {
    std::deque<double> hist{10.0, 9.8};
    CHECK(detect_event(hist, 9.0, far, cfg) == Event::EndKjSup);
  }
  SUBCASE("below the dormancy threshold wins regardless of history") {
    std::deque<double> hist{10.0, 9.0};
    CHECK(detect_event(hist, cfg.delta_v / 2, far, cfg) == Event::DormantEntry);
    CHECK(detect_event({}, cfg.delta_v / 2, far, cfg) == Event::DormantEntry);
  }
  SUBCASE("warm-up: fewer than two history values yields none") {
    CHECK(detect_event({}, 8.0, far, cfg) == Event::None);
    CHECK(detect_event({10.0}, 8.0, far, cfg) == Event::None);
  }
  SUBCASE("exact equality does not start an event") {
    std::deque<double> hist{10.0, 9.0};
    CHECK(detect_event(hist, cfg.lambda0 * 9.0, far, cfg) != Event::StartKj);
  }
  SUBCASE("explicit state ball also triggers dormancy when configured") {
    cfg.delta_x = 1e-2;
    std::deque<double> hist{10.0, 9.0};
    CHECK(detect_event(hist, 8.9, 1e-3, cfg) == Event::DormantEntry);
    cfg.delta_x.reset();
    CHECK(detect_event(hist, 8.9, 1e-3, cfg) == Event::StartKj);
  }
}

TEST_CASE("generate_excitation") {
  SUBCASE("scalar inputs, norm bound and certified level") {
    auto [seq, cert] = generate_excitation(1, 1, 3, 1.0, 0.1, 5);
    CHECK(seq.size() == 3);
    for (const auto& e : seq) CHECK(e.norm() <= 1.0 + 1e-12);
    CHECK(cert.order == 2);
    CHECK(cert.level >= 0.1);
  }
  SUBCASE("zero target accepts any bounded draw") {
    auto [seq, cert] = generate_excitation(2, 2, 8, 0.5, 0.0, 9);
    CHECK(cert.level >= 0.0);
    for (const auto& e : seq) CHECK(e.norm() <= 0.5 + 1e-12);
  }
  SUBCASE("flight-sized window reaches the pinned level") {
    auto [seq, cert] = generate_excitation(2, 2, 8, 0.3, 0.01, 2024);
    CHECK(seq.size() == 8);
    CHECK(cert.level >= 0.01);
    CHECK(cert.order == 3);
  }
  SUBCASE("unreachable target reports the best achieved level") {
    try {
      generate_excitation(1, 1, 3, 0.1, 100.0, 5);
      FAIL("expected ExcitationDesignError");
    } catch (const ExcitationDesignError& e) {
      CHECK(e.best_level > 0.0);
      CHECK(e.best_level < 100.0);
    }
  }
  SUBCASE("deterministic in the seed") {
    auto [a, ca] = generate_excitation(2, 2, 8, 0.3, 0.0, 31);
    auto [b, cb] = generate_excitation(2, 2, 8, 0.3, 0.0, 31);
    CHECK(ca.level == cb.level);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);
  }
}

TEST_CASE("warm_start") {
  SUBCASE("flight offline data solves and stabilizes") {
    const auto triple = flight_offline_triple();
    const auto cfg = fixtures::flight();
    SupervisorState st = warm_start(triple, flight_sup_cfg());
    CHECK(st.phase == Phase::Hold);
    CHECK(st.k == 0);
    const double rho =
        verify_closed_loop(cfg.modes[0].a, cfg.modes[0].b, st.k_gain);
    CHECK(rho < 1.0);
    CHECK(numerics::min_eigenvalue_sym(st.p) >= 1.0 - 1e-6);
  }
  SUBCASE("zero offline data is a configuration error") {
    DataTriple zero;
    zero.u_minus = Matrix::Zero(2, 15);
    zero.x_minus = Matrix::Zero(2, 15);
    zero.x_plus = Matrix::Zero(2, 15);
    CHECK_THROWS_AS(warm_start(zero, flight_sup_cfg()), WarmStartError);
  }
  SUBCASE("printed rank-collapse data is a configuration error") {
    const auto data = fixtures::remark1();
    SupervisorConfig cfg;
    cfg.lambda0 = 0.945;
    cfg.delta_v = 0.05;
    cfg.delta_eps = 0.5;
    cfg.alpha = 1.0;
    cfg.n = 3;
    cfg.t = 5;
    cfg.n_x = 1;
    cfg.n_u = 1;
    CHECK_THROWS_AS(warm_start(data.triple_noisy(), cfg), WarmStartError);
  }
}

TEST_CASE("control_step phase machine") {
  const auto fixture = fixtures::flight();
  const SupervisorConfig cfg = flight_sup_cfg();
  DataWindow window(15, Vector::Zero(2));
  const auto triple = flight_offline_triple(&window);
  SupervisorState st = warm_start(triple, cfg);
  const Matrix p0 = st.p;

  SUBCASE("first step holds with the offline solution") {
    Vector x = window.latest_state();
    auto [dec, next] = control_step(st, x, window, cfg);
    CHECK(dec.solved_sdp == false);
    CHECK(dec.phase_after == Phase::Hold);
    CHECK((next.p - p0).norm() == 0.0);  // unchanged without a solve
    CHECK(dec.aux_value == doctest::Approx(auxiliary_value(x, p0)));
    CHECK((dec.u - st.k_gain * x).norm() == 0.0);
  }

  SUBCASE("dormant freezes the gain and skips solving") {
    st.phase = Phase::Dormant;
    Vector x = Vector::Constant(2, 1e-4);  // well inside the dormancy ball
    auto [dec, next] = control_step(st, x, window, cfg);
    CHECK(dec.solved_sdp == false);
    CHECK(dec.phase_after == Phase::Dormant);
    CHECK((dec.u - st.k_gain * x).norm() == 0.0);
    CHECK((next.k_gain - st.k_gain).norm() == 0.0);
  }

  SUBCASE("a start event opens an excitation window of exactly N emissions") {
    st.v_hist = {10.0, 9.0};  // decaying history
    Vector x = Vector::Ones(2);
    // Make the aux value jump: V(x) with the held P will exceed lambda0 * 9.
    auto [dec, next] = control_step(st, x, window, cfg);
    REQUIRE(dec.event == Event::StartKj);
    CHECK(dec.phase_after == Phase::Excite);
    CHECK(dec.u.norm() <= cfg.delta_eps + 1e-12);
    // Run out the window: N - 1 further excitation steps, then solving.
    SupervisorState cur = next;
    int excite_steps = 1;
    for (int i = 0; i < cfg.n - 1; ++i) {
      auto [d2, n2] = control_step(cur, x, window, cfg);
      CHECK(d2.phase_after == Phase::Excite);
      CHECK(d2.u.norm() <= cfg.delta_eps + 1e-12);
      cur = n2;
      ++excite_steps;
    }
    CHECK(excite_steps == cfg.n);
    auto [d3, n3] = control_step(cur, x, window, cfg);
    CHECK(d3.solved_sdp == true);  // solving begins right after the window
    CHECK((d3.phase_after == Phase::Solve || d3.phase_after == Phase::Hold ||
           d3.phase_after == Phase::Dormant));
  }

  SUBCASE("dormant exit re-excites immediately") {
    st.phase = Phase::Dormant;
    Vector x = Vector::Ones(2);  // far outside the ball
    auto [dec, next] = control_step(st, x, window, cfg);
    CHECK(dec.event == Event::DormantExit);
    CHECK(dec.phase_after == Phase::Excite);
    REQUIRE(next.event_log.size() >= 2);
    CHECK(next.event_log[next.event_log.size() - 2].event == Event::DormantExit);
    CHECK(next.event_log.back().event == Event::StartKj);
  }
}
