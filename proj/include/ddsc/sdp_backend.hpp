#pragma once

#include <limits>
#include <vector>

#include "ddsc/matrix.hpp"

namespace ddsc {

/// One entry of a sparse symmetric coefficient matrix.
struct SparseCoeff {
  int p = 0;
  int q = 0;
  double v = 0.0;
};

/// One PSD constraint F0 + sum_j y_{var_index[j]} * var_coeff[j] >= 0.
/// Coefficient matrices are stored with their full symmetric pattern.
struct LmiBlock {
  int dim = 0;
  Matrix f0;
  std::vector<int> var_index;
  std::vector<std::vector<SparseCoeff>> var_coeff;

  void add_var(int var, std::vector<SparseCoeff> coeff) {
    var_index.push_back(var);
    var_coeff.push_back(std::move(coeff));
  }

  /// F0 + sum y_j F_j at the given point.
  Matrix evaluate(const Vector& y) const;
};

/// min cost' y  subject to  every block PSD  and  eq_a y = eq_b.
struct LmiProblem {
  int num_vars = 0;
  Vector cost;
  std::vector<LmiBlock> blocks;
  Matrix eq_a;  // 0 x num_vars when absent
  Vector eq_b;

  int total_block_dim() const;
};

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolverStats {
  long newton_iterations = 0;
  int outer_iterations = 0;
  double final_gap = std::numeric_limits<double>::infinity();
  /// Certified optimum bound of the phase-I margin variable; negative means a
  /// strictly feasible point exists.
  double phase1_margin = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vector y;
  SolverStats stats;
};

/// Conic solver interface: deterministic given identical problem data and settings.
class SolverBackend {
 public:
  struct Settings {
    double tolerance = 1e-8;       // duality-gap target and feasibility tolerance
    long max_iterations = 50000;   // total Newton iteration cap
  };

  virtual ~SolverBackend() = default;
  virtual SolveOutcome solve(const LmiProblem& problem) const = 0;
  virtual const Settings& settings() const = 0;
  /// Whether one instance may be shared across concurrent solves.
  virtual bool reentrant() const { return false; }
};

/// Reference backend: dense log-det barrier path following with a phase-I
/// feasibility stage. Equality constraints are eliminated through a null-space
/// reparameterization before the barrier stages run. Stateless and reentrant.
class LogBarrierSolver : public SolverBackend {
 public:
  LogBarrierSolver() = default;
  explicit LogBarrierSolver(Settings settings) : settings_(settings) {}

  SolveOutcome solve(const LmiProblem& problem) const override;
  const Settings& settings() const override { return settings_; }
  bool reentrant() const override { return true; }

 private:
  Settings settings_;
};

}  // namespace ddsc
