#pragma once

#include "ddsc/data_window.hpp"
#include "ddsc/matrix.hpp"
#include "ddsc/sdp_backend.hpp"

namespace ddsc {

/// Input to the data-based synthesis programs.
struct SdpProblemData {
  Matrix u_minus;  // n_u x T
  Matrix x_minus;  // n_x x T
  Matrix x_plus;   // n_x x T
  double alpha = 1.0;

  SdpProblemData() = default;
  SdpProblemData(Matrix u, Matrix xm, Matrix xp, double alpha);
  SdpProblemData(const DataTriple& t, double alpha)
      : SdpProblemData(t.u_minus, t.x_minus, t.x_plus, alpha) {}

  Index n_x() const { return x_minus.rows(); }
  Index n_u() const { return u_minus.rows(); }
  Index samples() const { return u_minus.cols(); }
};

struct SdpSolutionStats {
  long iterations = 0;
  double final_gap = 0.0;
  double phase1_margin = 0.0;
  double rank_margin = 0.0;
  /// Scale divided out of the data matrices on the numerical-failure retry path;
  /// 1 when the first solve succeeded. The solution refers to the scaled data.
  double data_scale = 1.0;
  // Residuals of the original (pre-Schur-complement) constraints at the solution.
  double residual_p_identity = 0.0;     // max(0, 1 - lambda_min(P))
  double residual_coupling = 0.0;       // ||X_minus Q - P||_F
  double residual_contraction = 0.0;    // lambda_max(Xp Q P^-1 Q' Xp' - P + I)
  double residual_objective = 0.0;      // tr(P) + tr(L) + alpha tr(V) - gamma
};

/// Decision variables of the synthesis SDP at an optimum. V is empty (0x0)
/// for the disturbance-compensated program, which has no V term.
struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double gamma = 0.0;
  Matrix q;  // T x n_x
  Matrix p;  // n_x x n_x symmetric
  Matrix l;  // n_u x n_u symmetric
  Matrix v;  // T x T symmetric, or empty
  SdpSolutionStats stats;
};

/// Shared reference backend instance (reentrant).
const SolverBackend& default_backend();

/// Robust data-based synthesis on the current window. Rank deficiency of
/// W = [U_minus; X_minus] is reported as Infeasible with the margin recorded.
/// A backend NumericalFailure triggers one retry with the data matrices divided
/// by their largest absolute entry.
SdpSolution solve_robust_sdp(const SdpProblemData& d,
                             const SolverBackend& backend = default_backend());

/// Disturbance-compensated program: X_plus is replaced by X_plus - D_minus and
/// the V term is dropped. Analysis/test path only; D_minus is never available
/// to the online controller.
SdpSolution solve_ideal_sdp(const SdpProblemData& d, const Matrix& d_minus,
                            const SolverBackend& backend = default_backend());

/// K = U_minus Q P^-1 (with the retry scale divided out of U_minus).
/// Requires an Optimal solution.
Matrix extract_gain(const Matrix& u_minus, const SdpSolution& sol);

/// Spectral radius of A + B K (analysis side; uses the true model).
double verify_closed_loop(const Matrix& a, const Matrix& b, const Matrix& k);

/// Residuals of the paper-form constraints for an arbitrary candidate point;
/// used for the post-solve check and for feasible-point constructions in tests.
SdpSolutionStats original_constraint_residuals(const SdpProblemData& d, double gamma,
                                               const Matrix& q, const Matrix& p, const Matrix& l,
                                               const Matrix& v, bool include_v,
                                               const Matrix* d_minus = nullptr);

}  // namespace ddsc
