#include "ddsc/synthesis.hpp"

#include <Eigen/Cholesky>

#include "ddsc/errors.hpp"
#include "ddsc/numerics.hpp"

namespace ddsc {

SdpProblemData::SdpProblemData(Matrix u, Matrix xm, Matrix xp, double alpha)
    : u_minus(std::move(u)), x_minus(std::move(xm)), x_plus(std::move(xp)), alpha(alpha) {
  require(u_minus.cols() == x_minus.cols() && x_minus.cols() == x_plus.cols(),
          "SdpProblemData: column counts must match");
  require(x_minus.rows() == x_plus.rows(), "SdpProblemData: state dimensions must match");
  require(u_minus.cols() > 0, "SdpProblemData: empty data");
  if (alpha <= 0.0) throw ConfigError("SdpProblemData: alpha must be positive");
}

const SolverBackend& default_backend() {
  static const LogBarrierSolver backend;
  return backend;
}

namespace {

/// Index bookkeeping for the decision vector [vec(Q) | vech(L) | vech(V) | gamma].
struct VarLayout {
  int t = 0, n_x = 0, n_u = 0;
  bool with_v = false;

  int q(int r, int c) const { return c * t + r; }
  int l(int i, int j) const {  // i <= j
    return t * n_x + i * n_u - i * (i + 1) / 2 + j;
  }
  int v(int i, int j) const {  // i <= j
    return t * n_x + n_u * (n_u + 1) / 2 + i * t - i * (i + 1) / 2 + j;
  }
  int gamma() const { return total() - 1; }
  int total() const {
    return t * n_x + n_u * (n_u + 1) / 2 + (with_v ? t * (t + 1) / 2 : 0) + 1;
  }
};

std::vector<SparseCoeff> sparsify(const Matrix& dense) {
  std::vector<SparseCoeff> out;
  for (Index p = 0; p < dense.rows(); ++p)
    for (Index q = 0; q < dense.cols(); ++q)
      if (dense(p, q) != 0.0) out.push_back({static_cast<int>(p), static_cast<int>(q), dense(p, q)});
  return out;
}

/// d sym(X_minus Q) / dQ(r,c) as a dense n_x x n_x matrix.
Matrix dsym_coupling(const Matrix& x_minus, int r, int c) {
  const Index n_x = x_minus.rows();
  Matrix ds = Matrix::Zero(n_x, n_x);
  for (Index i = 0; i < n_x; ++i) {
    ds(i, c) += 0.5 * x_minus(i, r);
    ds(c, i) += 0.5 * x_minus(i, r);
  }
  return ds;
}

/// Builds the convexified program. The paper-form constraints with the
/// coupling P = X_minus Q are rewritten through Schur complements into
/// four LMIs plus one linear constraint binding gamma; the symmetry of
/// X_minus Q is imposed through equality constraints.
LmiProblem build_problem(const SdpProblemData& d, const Matrix& x_plus_eff, bool with_v) {
  const int t = static_cast<int>(d.samples());
  const int n_x = static_cast<int>(d.n_x());
  const int n_u = static_cast<int>(d.n_u());
  VarLayout idx{t, n_x, n_u, with_v};

  LmiProblem prob;
  prob.num_vars = idx.total();
  prob.cost = Vector::Zero(prob.num_vars);
  prob.cost(idx.gamma()) = 1.0;

  // Contraction block: [sym(X-Q) - I, Xp Q; (Xp Q)', sym(X-Q)] >= 0.
  {
    LmiBlock blk;
    blk.dim = 2 * n_x;
    blk.f0 = Matrix::Zero(blk.dim, blk.dim);
    blk.f0.topLeftCorner(n_x, n_x) = -Matrix::Identity(n_x, n_x);
    for (int c = 0; c < n_x; ++c) {
      for (int r = 0; r < t; ++r) {
        Matrix dense = Matrix::Zero(blk.dim, blk.dim);
        const Matrix ds = dsym_coupling(d.x_minus, r, c);
        dense.topLeftCorner(n_x, n_x) += ds;
        dense.bottomRightCorner(n_x, n_x) += ds;
        for (int i = 0; i < n_x; ++i) {
          dense(i, n_x + c) += x_plus_eff(i, r);
          dense(n_x + c, i) += x_plus_eff(i, r);
        }
        blk.add_var(idx.q(r, c), sparsify(dense));
      }
    }
    prob.blocks.push_back(std::move(blk));
  }

  // Gain-energy block: [L, U Q; (U Q)', sym(X-Q)] >= 0.
  {
    LmiBlock blk;
    blk.dim = n_u + n_x;
    blk.f0 = Matrix::Zero(blk.dim, blk.dim);
    for (int i = 0; i < n_u; ++i)
      for (int j = i; j < n_u; ++j) {
        std::vector<SparseCoeff> coeff{{i, j, 1.0}};
        if (i != j) coeff.push_back({j, i, 1.0});
        blk.add_var(idx.l(i, j), std::move(coeff));
      }
    for (int c = 0; c < n_x; ++c) {
      for (int r = 0; r < t; ++r) {
        Matrix dense = Matrix::Zero(blk.dim, blk.dim);
        dense.bottomRightCorner(n_x, n_x) += dsym_coupling(d.x_minus, r, c);
        for (int i = 0; i < n_u; ++i) {
          dense(i, n_u + c) += d.u_minus(i, r);
          dense(n_u + c, i) += d.u_minus(i, r);
        }
        blk.add_var(idx.q(r, c), sparsify(dense));
      }
    }
    prob.blocks.push_back(std::move(blk));
  }

  // Excitation-energy block: [V, Q; Q', sym(X-Q)] >= 0.
  if (with_v) {
    LmiBlock blk;
    blk.dim = t + n_x;
    blk.f0 = Matrix::Zero(blk.dim, blk.dim);
    for (int i = 0; i < t; ++i)
      for (int j = i; j < t; ++j) {
        std::vector<SparseCoeff> coeff{{i, j, 1.0}};
        if (i != j) coeff.push_back({j, i, 1.0});
        blk.add_var(idx.v(i, j), std::move(coeff));
      }
    for (int c = 0; c < n_x; ++c) {
      for (int r = 0; r < t; ++r) {
        Matrix dense = Matrix::Zero(blk.dim, blk.dim);
        dense.bottomRightCorner(n_x, n_x) += dsym_coupling(d.x_minus, r, c);
        dense(r, t + c) += 1.0;
        dense(t + c, r) += 1.0;
        blk.add_var(idx.q(r, c), sparsify(dense));
      }
    }
    prob.blocks.push_back(std::move(blk));
  }

  // sym(X-Q) >= I.
  {
    LmiBlock blk;
    blk.dim = n_x;
    blk.f0 = -Matrix::Identity(n_x, n_x);
    for (int c = 0; c < n_x; ++c)
      for (int r = 0; r < t; ++r)
        blk.add_var(idx.q(r, c), sparsify(dsym_coupling(d.x_minus, r, c)));
    prob.blocks.push_back(std::move(blk));
  }

  // gamma - tr(P) - tr(L) - alpha tr(V) >= 0, keeping gamma reportable.
  {
    LmiBlock blk;
    blk.dim = 1;
    blk.f0 = Matrix::Zero(1, 1);
    blk.add_var(idx.gamma(), {{0, 0, 1.0}});
    for (int c = 0; c < n_x; ++c)
      for (int r = 0; r < t; ++r)
        if (d.x_minus(c, r) != 0.0) blk.add_var(idx.q(r, c), {{0, 0, -d.x_minus(c, r)}});
    for (int i = 0; i < n_u; ++i) blk.add_var(idx.l(i, i), {{0, 0, -1.0}});
    if (with_v)
      for (int i = 0; i < t; ++i) blk.add_var(idx.v(i, i), {{0, 0, -d.alpha}});
    prob.blocks.push_back(std::move(blk));
  }

  // Symmetry of the coupling X_minus Q.
  const int n_eq = n_x * (n_x - 1) / 2;
  prob.eq_a = Matrix::Zero(n_eq, prob.num_vars);
  prob.eq_b = Vector::Zero(n_eq);
  int row = 0;
  for (int i = 0; i < n_x; ++i)
    for (int j = i + 1; j < n_x; ++j, ++row)
      for (int r = 0; r < t; ++r) {
        prob.eq_a(row, idx.q(r, j)) += d.x_minus(i, r);
        prob.eq_a(row, idx.q(r, i)) -= d.x_minus(j, r);
      }

  return prob;
}

SdpSolution unpack(const SdpProblemData& d, const SolveOutcome& raw, bool with_v) {
  const int t = static_cast<int>(d.samples());
  const int n_x = static_cast<int>(d.n_x());
  const int n_u = static_cast<int>(d.n_u());
  VarLayout idx{t, n_x, n_u, with_v};
  SdpSolution sol;
  sol.status = raw.status;
  sol.stats.iterations = raw.stats.newton_iterations;
  sol.stats.final_gap = raw.stats.final_gap;
  sol.stats.phase1_margin = raw.stats.phase1_margin;
  if (raw.status != SolveStatus::Optimal) return sol;
  sol.q.resize(t, n_x);
  for (int c = 0; c < n_x; ++c)
    for (int r = 0; r < t; ++r) sol.q(r, c) = raw.y(idx.q(r, c));
  sol.p = numerics::symmetrize(d.x_minus * sol.q);
  sol.l.resize(n_u, n_u);
  for (int i = 0; i < n_u; ++i)
    for (int j = i; j < n_u; ++j) sol.l(i, j) = sol.l(j, i) = raw.y(idx.l(i, j));
  if (with_v) {
    sol.v.resize(t, t);
    for (int i = 0; i < t; ++i)
      for (int j = i; j < t; ++j) sol.v(i, j) = sol.v(j, i) = raw.y(idx.v(i, j));
  } else {
    sol.v.resize(0, 0);
  }
  sol.gamma = raw.y(idx.gamma());
  return sol;
}

constexpr double kPostSolveTolerance = 1e-6;

bool residuals_ok(const SdpSolutionStats& r) {
  return r.residual_p_identity <= kPostSolveTolerance &&
         r.residual_coupling <= kPostSolveTolerance &&
         r.residual_contraction <= kPostSolveTolerance &&
         r.residual_objective <= kPostSolveTolerance;
}

SdpSolution solve_common(const SdpProblemData& d, const Matrix* d_minus,
                         const SolverBackend& backend) {
  const bool with_v = (d_minus == nullptr);

  // The rank condition on W gates the data-based parameterization: a deficient
  // W cannot represent the closed loop, so the program is reported infeasible
  // with the margin attached.
  Matrix w(d.n_u() + d.n_x(), d.samples());
  w.topRows(d.n_u()) = d.u_minus;
  w.bottomRows(d.n_x()) = d.x_minus;
  auto [smin, smax] = numerics::singular_value_range(w);
  if (!(smin > numerics::rank_tolerance(smax))) {
    SdpSolution sol;
    sol.status = SolveStatus::Infeasible;
    sol.stats.rank_margin = smin;
    return sol;
  }

  auto attempt = [&](const SdpProblemData& data, const Matrix* dm, double scale) {
    Matrix xp_eff = data.x_plus;
    if (dm != nullptr) xp_eff -= *dm;
    LmiProblem prob = build_problem(data, xp_eff, with_v);
    SdpSolution sol = unpack(data, backend.solve(prob), with_v);
    sol.stats.rank_margin = smin;
    sol.stats.data_scale = scale;
    if (sol.status == SolveStatus::Optimal) {
      auto res = original_constraint_residuals(data, sol.gamma, sol.q, sol.p, sol.l, sol.v,
                                               with_v, dm);
      sol.stats.residual_p_identity = res.residual_p_identity;
      sol.stats.residual_coupling = res.residual_coupling;
      sol.stats.residual_contraction = res.residual_contraction;
      sol.stats.residual_objective = res.residual_objective;
      if (!residuals_ok(sol.stats)) sol.status = SolveStatus::NumericalFailure;
    }
    return sol;
  };

  SdpSolution sol = attempt(d, d_minus, 1.0);
  if (sol.status == SolveStatus::NumericalFailure) {
    // One retry with normalized data. Scaled input-state data describes the
    // same system, so a gain extracted with the scaled U_minus is still valid.
    double scale = std::max({d.u_minus.cwiseAbs().maxCoeff(), d.x_minus.cwiseAbs().maxCoeff(),
                             d.x_plus.cwiseAbs().maxCoeff()});
    if (scale > 0.0 && std::isfinite(scale)) {
      SdpProblemData scaled(d.u_minus / scale, d.x_minus / scale, d.x_plus / scale, d.alpha);
      Matrix dm_scaled;
      const Matrix* dm_ptr = nullptr;
      if (d_minus != nullptr) {
        dm_scaled = *d_minus / scale;
        dm_ptr = &dm_scaled;
      }
      SdpSolution retry = attempt(scaled, dm_ptr, scale);
      retry.stats.rank_margin = smin;
      if (retry.status != SolveStatus::NumericalFailure) return retry;
    }
  }
  return sol;
}

}  // namespace

SdpSolution solve_robust_sdp(const SdpProblemData& d, const SolverBackend& backend) {
  return solve_common(d, nullptr, backend);
}

SdpSolution solve_ideal_sdp(const SdpProblemData& d, const Matrix& d_minus,
                            const SolverBackend& backend) {
  require(d_minus.rows() == d.n_x() && d_minus.cols() == d.samples(),
          "solve_ideal_sdp: D_minus shape mismatch");
  return solve_common(d, &d_minus, backend);
}

Matrix extract_gain(const Matrix& u_minus, const SdpSolution& sol) {
  if (sol.status != SolveStatus::Optimal) {
    throw std::logic_error("extract_gain: solution is not Optimal");
  }
  require(u_minus.cols() == sol.q.rows(), "extract_gain: U_minus incompatible with Q");
  const Matrix uq = (u_minus / sol.stats.data_scale) * sol.q;
  return sol.p.ldlt().solve(uq.transpose()).transpose();
}

double verify_closed_loop(const Matrix& a, const Matrix& b, const Matrix& k) {
  require(a.rows() == a.cols() && b.rows() == a.rows() && k.rows() == b.cols() &&
              k.cols() == a.cols(),
          "verify_closed_loop: dimension mismatch");
  return numerics::spectral_radius(a + b * k);
}

SdpSolutionStats original_constraint_residuals(const SdpProblemData& d, double gamma,
                                               const Matrix& q, const Matrix& p, const Matrix& l,
                                               const Matrix& v, bool include_v,
                                               const Matrix* d_minus) {
  SdpSolutionStats r;
  Matrix xp = d.x_plus;
  if (d_minus != nullptr) xp -= *d_minus;
  r.residual_p_identity = std::max(0.0, 1.0 - numerics::min_eigenvalue_sym(p));
  r.residual_coupling = (d.x_minus * q - p).norm();
  const Matrix xq = xp * q;
  const Matrix contraction = xq * p.ldlt().solve(xq.transpose()) - p +
                             Matrix::Identity(p.rows(), p.cols());
  r.residual_contraction = numerics::max_eigenvalue_sym(contraction);
  double total = p.trace() + l.trace();
  if (include_v) total += d.alpha * v.trace();
  r.residual_objective = total - gamma;
  return r;
}

}  // namespace ddsc
