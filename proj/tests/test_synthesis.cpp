#include <doctest.h>

#include "ddsc/fixtures.hpp"
#include "ddsc/plant.hpp"
#include "ddsc/numerics.hpp"
#include "ddsc/rng.hpp"
#include "ddsc/synthesis.hpp"
#include "oracles.hpp"

using namespace ddsc;

namespace {

/// Noise-free window from one open-loop simulation with uniform inputs.
DataTriple simulate_triple(const Matrix& a, const Matrix& b, int t, std::uint64_t seed,
                           double input_range = 1.0) {
  Rng rng(mix_seed(seed, 17));
  Vector x = Vector::Zero(a.rows());
  DataWindow window(t, x);
  for (int k = 0; k < t; ++k) {
    Vector u(b.cols());
    for (Index j = 0; j < u.size(); ++j) u(j) = rng.uniform(-input_range, input_range);
    x = a * x + b * u;
    window.push(u, x);
  }
  return window.snapshot();
}

}  // namespace

TEST_CASE("scalar noise-free data yields a stabilizing gain") {
  Matrix a = Matrix::Constant(1, 1, 0.5);
  Matrix b = Matrix::Constant(1, 1, 1.0);
  DataTriple triple = simulate_triple(a, b, 5, 3);
  SdpSolution sol = solve_robust_sdp(SdpProblemData(triple, 1.0));
  REQUIRE(sol.status == SolveStatus::Optimal);
  Matrix k = extract_gain(triple.u_minus, sol);
  CHECK(std::abs(0.5 + k(0, 0)) < 1.0);
  CHECK(sol.p(0, 0) >= 1.0 - 1e-6);
}

TEST_CASE("printed noisy counterexample window is infeasible (rank collapse)") {
  const auto data = fixtures::remark1();
  SdpSolution sol = solve_robust_sdp(SdpProblemData(data.triple_noisy(), 1.0));
  CHECK(sol.status == SolveStatus::Infeasible);
  CHECK(sol.stats.rank_margin < 1e-10);
}

TEST_CASE("printed noise-free counterexample window is feasible and stabilizing") {
  const auto data = fixtures::remark1();
  DataTriple triple = data.triple_noise_free();
  SdpSolution sol = solve_robust_sdp(SdpProblemData(triple, 1.0));
  REQUIRE(sol.status == SolveStatus::Optimal);
  Matrix k = extract_gain(triple.u_minus, sol);
  CHECK(std::abs(1.0 + 0.5 * k(0, 0)) < 1.0);
}

TEST_CASE("flight mode-1 window with bounded noise solves and stabilizes") {
  const auto cfg = fixtures::flight();
  const Matrix a = cfg.modes[0].a;
  const Matrix b = cfg.modes[0].b;
  DisturbanceModel dist = DisturbanceModel::uniform_ball(2, cfg.disturbance.bound,
                                                         cfg.disturbance.seed);
  const auto offline = generate_offline_trajectory({a, b}, dist, cfg.offline.x_start, 15,
                                                   cfg.offline.input_range, cfg.offline.seed);
  DataWindow window(15, offline.states.front());
  for (std::size_t i = 0; i < offline.inputs.size(); ++i) {
    window.push(offline.inputs[i], offline.states[i + 1]);
  }
  DataTriple triple = window.snapshot();
  SdpSolution sol = solve_robust_sdp(SdpProblemData(triple, 1.0));
  REQUIRE(sol.status == SolveStatus::Optimal);
  Matrix k_gain = extract_gain(triple.u_minus, sol);
  const double rho = verify_closed_loop(a, b, k_gain);
  const auto [m1, m2] = oracles::eig2_moduli(a + b * k_gain);
  CHECK(rho == doctest::Approx(std::max(m1, m2)).epsilon(1e-9));
  CHECK(rho < 1.0);
}

TEST_CASE("disturbance-compensated and robust programs sandwich each other at d = 0") {
  Matrix a(2, 2), b(2, 1);
  a << 1.1, 0.3, 0.0, 0.7;
  b << 0.5, 1.0;
  DataTriple triple = simulate_triple(a, b, compute_n(2, 1).t_min, 11);
  const double alpha = 1.0;
  SdpProblemData data(triple, alpha);
  Matrix zero_d = Matrix::Zero(2, triple.samples());
  SdpSolution robust = solve_robust_sdp(data);
  SdpSolution ideal = solve_ideal_sdp(data, zero_d);
  REQUIRE(robust.status == SolveStatus::Optimal);
  REQUIRE(ideal.status == SolveStatus::Optimal);
  // Same constraint set when d = 0: dropping the V term of a robust optimum
  // is ideal-feasible, and augmenting an ideal optimum with V := Q P^-1 Q' is
  // robust-feasible.
  const double robust_without_v = robust.gamma - alpha * robust.v.trace();
  CHECK(ideal.gamma <= robust_without_v + 1e-6);
  const Matrix v_aug = ideal.q * ideal.p.ldlt().solve(ideal.q.transpose());
  CHECK(robust.gamma <= ideal.gamma + alpha * v_aug.trace() + 1e-6);
}

TEST_CASE("ideal program recovers the unit-weight LQR gain") {
  struct Case {
    int n_x, n_u;
    std::uint64_t seed;
  };
  for (const Case c : {Case{2, 1, 101}, Case{2, 2, 102}, Case{3, 2, 103}}) {
    const auto sys = oracles::random_controllable(c.n_x, c.n_u, c.seed);
    DataTriple triple = simulate_triple(sys.a, sys.b, compute_n(c.n_x, c.n_u).t_min, c.seed + 7);
    SdpProblemData data(triple, 1.0);
    SdpSolution sol = solve_ideal_sdp(data, Matrix::Zero(c.n_x, triple.samples()));
    REQUIRE(sol.status == SolveStatus::Optimal);
    Matrix k = extract_gain(triple.u_minus, sol);
    const auto lqr = oracles::riccati_lqr(sys.a, sys.b);
    CHECK((k - lqr.k).norm() <= 1e-3);
    // The optimal value matches the Riccati cost tr(X).
    CHECK(sol.gamma == doctest::Approx(lqr.x.trace()).epsilon(1e-4));
  }
}

TEST_CASE("scaling an ideal optimum by eta2 satisfies the robust constraints") {
  const auto cfg = fixtures::flight();
  DataTriple triple = simulate_triple(cfg.modes[0].a, cfg.modes[0].b, 15, 5, 0.3);
  SdpProblemData data(triple, 1.0);
  SdpSolution ideal = solve_ideal_sdp(data, Matrix::Zero(2, 15));
  REQUIRE(ideal.status == SolveStatus::Optimal);
  const Matrix v_bar = ideal.q * ideal.p.ldlt().solve(ideal.q.transpose());
  const double gamma_bar = ideal.p.trace() + ideal.l.trace() + data.alpha * v_bar.trace();
  for (double eta2 : {1.0, 2.0}) {
    auto res = original_constraint_residuals(data, eta2 * gamma_bar, eta2 * ideal.q,
                                             eta2 * ideal.p, eta2 * ideal.l, eta2 * v_bar,
                                             /*include_v=*/true);
    CHECK(res.residual_p_identity <= 1e-8);
    CHECK(res.residual_coupling <= 1e-8);
    CHECK(res.residual_contraction <= 1e-8);
    CHECK(res.residual_objective <= 1e-8);
  }
}

TEST_CASE("extract_gain: zero Q with identity P gives the zero gain") {
  SdpSolution sol;
  sol.status = SolveStatus::Optimal;
  sol.q = Matrix::Zero(5, 2);
  sol.p = Matrix::Identity(2, 2);
  Matrix u = Matrix::Ones(1, 5);
  CHECK(extract_gain(u, sol).norm() == 0.0);
  sol.status = SolveStatus::Infeasible;
  CHECK_THROWS_AS(extract_gain(u, sol), std::logic_error);
}

TEST_CASE("verify_closed_loop basics") {
  Matrix a(2, 2), b(2, 1), k(1, 2);
  a << 0.3, 0.1, 0.0, 0.4;
  b << 1.0, 0.0;
  k.setZero();
  CHECK(verify_closed_loop(a, b, k) == doctest::Approx(0.4));
  Matrix a1 = Matrix::Constant(1, 1, 1.0);
  Matrix b1 = Matrix::Constant(1, 1, 1.0);
  Matrix k1 = Matrix::Constant(1, 1, -1.0);
  CHECK(verify_closed_loop(a1, b1, k1) == doctest::Approx(0.0));
}

TEST_CASE("noise-free stabilization over a random-system sweep") {
  int optimal = 0;
  const int trials = 15;
  for (int i = 0; i < trials; ++i) {
    const int n_x = 2 + static_cast<int>(i % 3);
    const int n_u = 1 + static_cast<int>(i % 2);
    const auto sys = oracles::random_controllable(n_x, n_u, 500 + i);
    DataTriple triple = simulate_triple(sys.a, sys.b, compute_n(n_x, n_u).t_min, 900 + i);
    SdpSolution sol = solve_robust_sdp(SdpProblemData(triple, 1.0));
    if (sol.status != SolveStatus::Optimal) continue;
    ++optimal;
    Matrix k = extract_gain(triple.u_minus, sol);
    CHECK(verify_closed_loop(sys.a, sys.b, k) < 1.0);
    // Post-solve residuals of the paper-form constraints stay tight.
    CHECK(sol.stats.residual_contraction <= 1e-6);
    CHECK(sol.stats.residual_p_identity <= 1e-6);
    CHECK(sol.stats.residual_coupling <= 1e-6);
  }
  CHECK(optimal >= trials - 1);
}
