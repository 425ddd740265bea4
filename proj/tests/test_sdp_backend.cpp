#include <doctest.h>

#include "ddsc/sdp_backend.hpp"

using namespace ddsc;

namespace {

LmiBlock scalar_block(double f0, int var, double coeff) {
  LmiBlock b;
  b.dim = 1;
  b.f0 = Matrix::Constant(1, 1, f0);
  b.add_var(var, {{0, 0, coeff}});
  return b;
}

}  // namespace

TEST_CASE("linear program as 1x1 blocks: min x s.t. x >= 1") {
  LmiProblem p;
  p.num_vars = 1;
  p.cost = Vector::Ones(1);
  p.blocks.push_back(scalar_block(-1.0, 0, 1.0));  // x - 1 >= 0
  LogBarrierSolver solver;
  auto out = solver.solve(p);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.y(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("2x2 PSD boundary: min y s.t. [[y,1],[1,y]] >= 0") {
  LmiProblem p;
  p.num_vars = 1;
  p.cost = Vector::Ones(1);
  LmiBlock b;
  b.dim = 2;
  b.f0 = Matrix::Zero(2, 2);
  b.f0(0, 1) = b.f0(1, 0) = 1.0;
  b.add_var(0, {{0, 0, 1.0}, {1, 1, 1.0}});
  p.blocks.push_back(std::move(b));
  LogBarrierSolver solver;
  auto out = solver.solve(p);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.y(0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("infeasible pair of scalar constraints") {
  LmiProblem p;
  p.num_vars = 1;
  p.cost = Vector::Ones(1);
  p.blocks.push_back(scalar_block(0.0, 0, 1.0));    // x >= 0
  p.blocks.push_back(scalar_block(-1.0, 0, -1.0));  // -x - 1 >= 0  i.e. x <= -1
  LogBarrierSolver solver;
  auto out = solver.solve(p);
  CHECK(out.status == SolveStatus::Infeasible);
}

TEST_CASE("equality constraints: min x + y s.t. x = y, x >= 1") {
  LmiProblem p;
  p.num_vars = 2;
  p.cost = Vector::Ones(2);
  p.blocks.push_back(scalar_block(-1.0, 0, 1.0));  // x >= 1
  p.blocks.push_back(scalar_block(-1.0, 1, 1.0));  // y >= 1
  p.eq_a = Matrix::Zero(1, 2);
  p.eq_a(0, 0) = 1.0;
  p.eq_a(0, 1) = -1.0;
  p.eq_b = Vector::Zero(1);
  LogBarrierSolver solver;
  auto out = solver.solve(p);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.y(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(out.y(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(out.y(0) - out.y(1)) < 1e-9);
}

TEST_CASE("inconsistent equalities are reported infeasible") {
  LmiProblem p;
  p.num_vars = 1;
  p.cost = Vector::Ones(1);
  p.blocks.push_back(scalar_block(1.0, 0, 1.0));
  p.eq_a = Matrix::Zero(2, 1);
  p.eq_a(0, 0) = 1.0;
  p.eq_a(1, 0) = 1.0;
  p.eq_b = Vector::Zero(2);
  p.eq_b(0) = 0.0;
  p.eq_b(1) = 1.0;
  LogBarrierSolver solver;
  CHECK(solver.solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("determinism: identical problems give identical objectives") {
  LmiProblem p;
  p.num_vars = 2;
  p.cost = Vector::Zero(2);
  p.cost(0) = 1.0;
  p.cost(1) = 0.5;
  LmiBlock b;
  b.dim = 2;
  b.f0 = -Matrix::Identity(2, 2);
  b.add_var(0, {{0, 0, 1.0}});
  b.add_var(1, {{1, 1, 1.0}, {0, 1, 0.25}, {1, 0, 0.25}});
  p.blocks.push_back(std::move(b));
  LogBarrierSolver solver;
  auto a = solver.solve(p);
  auto c = solver.solve(p);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(c.status == SolveStatus::Optimal);
  CHECK(a.stats.objective == c.stats.objective);  // bit-identical, same path
  CHECK((a.y - c.y).norm() == 0.0);
}
