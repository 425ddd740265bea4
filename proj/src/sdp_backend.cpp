#include "ddsc/sdp_backend.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <functional>

#include "ddsc/errors.hpp"

namespace ddsc {

Matrix LmiBlock::evaluate(const Vector& y) const {
  Matrix s = f0;
  for (std::size_t j = 0; j < var_index.size(); ++j) {
    const double yv = y(var_index[j]);
    if (yv == 0.0) continue;
    for (const auto& c : var_coeff[j]) s(c.p, c.q) += yv * c.v;
  }
  return s;
}

int LmiProblem::total_block_dim() const {
  int m = 0;
  for (const auto& b : blocks) m += b.dim;
  return m;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kBarrierMultiplier = 20.0;
constexpr double kNewtonDecrementTol = 1e-11;
constexpr double kEarlyExitMargin = -1e-4;   // phase-I stop once this interior margin is found
constexpr double kInfeasibleMargin = -1e-8;  // margins above this count as no usable interior
constexpr int kMaxInnerIterations = 60;

struct BlockState {
  Eigen::LLT<Matrix> llt;
  Matrix sinv;
  double logdet = 0.0;
};

/// Factorization of every block at a point; pd == false if any block is not PD.
struct PointState {
  std::vector<BlockState> blocks;
  bool pd = false;
  double barrier = 0.0;  // -sum logdet
};

PointState factorize(const std::vector<LmiBlock>& blocks, const Vector& z,
                     bool need_inverse) {
  PointState st;
  st.blocks.resize(blocks.size());
  st.pd = true;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Matrix s = blocks[b].evaluate(z);
    if (!s.allFinite()) {
      st.pd = false;
      return st;
    }
    auto& bs = st.blocks[b];
    bs.llt.compute(s);
    if (bs.llt.info() != Eigen::Success) {
      st.pd = false;
      return st;
    }
    double logdet = 0.0;
    const auto& l = bs.llt.matrixLLT();
    for (Index i = 0; i < l.rows(); ++i) {
      const double d = l(i, i);
      if (!(d > 0.0)) {
        st.pd = false;
        return st;
      }
      logdet += std::log(d);
    }
    bs.logdet = 2.0 * logdet;
    st.barrier -= bs.logdet;
    if (need_inverse) {
      bs.sinv = bs.llt.solve(Matrix::Identity(s.rows(), s.cols()));
    }
  }
  return st;
}

double smallest_block_eigenvalue(const std::vector<LmiBlock>& blocks, const Vector& z) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b.evaluate(z));
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

/// Barrier path following for min cost' z s.t. blocks PSD, eq_a z = eq_b,
/// starting from a strictly feasible, equality-feasible z.
/// early_exit, when set, stops the minimization as soon as it returns true.
bool barrier_minimize(const std::vector<LmiBlock>& blocks, const Vector& cost,
                      const Matrix& eq_a, const Vector& z_init, double gap_target,
                      long max_newton, SolverStats& stats, Vector& z_out,
                      const std::function<bool(const Vector&)>& early_exit) {
  const int n = static_cast<int>(cost.size());
  const Index m_eq = eq_a.rows();
  int m_total = 0;
  for (const auto& b : blocks) m_total += b.dim;

  Vector z = z_init;
  double t = 1.0;
  Vector grad(n);
  Matrix hess(n, n);

  while (true) {
    ++stats.outer_iterations;
    for (int inner = 0; inner < kMaxInnerIterations; ++inner) {
      if (early_exit && early_exit(z)) {
        z_out = z;
        stats.final_gap = m_total / t;
        return true;
      }
      PointState st = factorize(blocks, z, /*need_inverse=*/true);
      if (!st.pd) return false;

      grad = t * cost;
      hess.setZero();
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& blk = blocks[b];
        const Matrix& sinv = st.blocks[b].sinv;
        const std::size_t nv = blk.var_index.size();
        for (std::size_t j = 0; j < nv; ++j) {
          double g = 0.0;
          for (const auto& c : blk.var_coeff[j]) g += c.v * sinv(c.q, c.p);
          grad(blk.var_index[j]) -= g;
        }
        for (std::size_t j1 = 0; j1 < nv; ++j1) {
          const auto& c1 = blk.var_coeff[j1];
          const int v1 = blk.var_index[j1];
          for (std::size_t j2 = j1; j2 < nv; ++j2) {
            const auto& c2 = blk.var_coeff[j2];
            // tr(S^-1 F_j1 S^-1 F_j2) over the sparse coefficient patterns.
            double acc = 0.0;
            for (const auto& a : c1) {
              const auto sinv_row_p = sinv.row(a.p);
              const auto sinv_row_q = sinv.row(a.q);
              for (const auto& bb : c2) {
                acc += a.v * bb.v * sinv_row_p(bb.q) * sinv_row_q(bb.p);
              }
            }
            const int v2 = blk.var_index[j2];
            if (v1 <= v2)
              hess(v1, v2) += acc;
            else
              hess(v2, v1) += acc;
          }
        }
      }
      hess = hess.selfadjointView<Eigen::Upper>();

      // Equality-constrained Newton step via the small Schur complement.
      double ridge = 1e-13 * std::max(1.0, hess.diagonal().maxCoeff());
      Vector dz(n);
      bool step_ok = false;
      for (int attempt = 0; attempt < 6 && !step_ok; ++attempt) {
        Matrix hreg = hess;
        hreg.diagonal().array() += ridge;
        Eigen::LDLT<Matrix> ldlt(hreg);
        if (ldlt.info() == Eigen::Success) {
          if (m_eq == 0) {
            dz = ldlt.solve(-grad);
          } else {
            Vector x1 = ldlt.solve(grad);
            Matrix x2 = ldlt.solve(eq_a.transpose());
            Matrix schur = eq_a * x2;
            Vector nu = schur.ldlt().solve(-eq_a * x1);
            dz = -x1 - x2 * nu;
          }
          if (dz.allFinite()) step_ok = true;
        }
        ridge *= 100.0;
      }
      if (!step_ok) return false;

      const double slope = grad.dot(dz);
      const double decrement = -slope;
      if (decrement <= 2.0 * kNewtonDecrementTol) break;

      // Backtracking line search keeping every block strictly PD.
      const double phi0 = t * cost.dot(z) + st.barrier;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        Vector z_trial = z + alpha * dz;
        PointState trial = factorize(blocks, z_trial, /*need_inverse=*/false);
        if (trial.pd) {
          const double phi = t * cost.dot(z_trial) + trial.barrier;
          if (phi <= phi0 + 0.25 * alpha * slope) {
            z = std::move(z_trial);
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      ++stats.newton_iterations;
      if (stats.newton_iterations > max_newton) return false;
      if (!moved) break;  // stalled: accept current center
    }

    stats.final_gap = m_total / t;
    if (early_exit && early_exit(z)) break;
    if (stats.final_gap <= gap_target) break;
    if (t > 1e16) break;
    t *= kBarrierMultiplier;
  }
  z_out = z;
  return true;
}

}  // namespace

SolveOutcome LogBarrierSolver::solve(const LmiProblem& problem) const {
  SolveOutcome out;
  const int n = problem.num_vars;
  if (n <= 0 || problem.cost.size() != n) {
    throw DimensionError("LogBarrierSolver: inconsistent problem dimensions");
  }
  for (const auto& b : problem.blocks) {
    require(b.dim > 0 && b.f0.rows() == b.dim && b.f0.cols() == b.dim,
            "LogBarrierSolver: bad block shape");
    require(b.var_index.size() == b.var_coeff.size(), "LogBarrierSolver: bad block coefficients");
    for (int v : b.var_index) require(v >= 0 && v < n, "LogBarrierSolver: variable out of range");
  }
  const Index m_eq = problem.eq_a.rows();
  if (m_eq > 0) {
    require(problem.eq_a.cols() == n && problem.eq_b.size() == m_eq,
            "LogBarrierSolver: bad equality shapes");
  }

  // Equality-feasible starting point (minimum norm).
  Vector z0 = Vector::Zero(n);
  if (m_eq > 0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(problem.eq_a);
    z0 = cod.solve(problem.eq_b);
    if ((problem.eq_a * z0 - problem.eq_b).norm() > 1e-9 * (1.0 + problem.eq_b.norm())) {
      out.status = SolveStatus::Infeasible;
      out.stats.phase1_margin = std::numeric_limits<double>::infinity();
      return out;
    }
  }

  // Phase I: find a strictly feasible point unless z0 already is one.
  const double margin0 = smallest_block_eigenvalue(problem.blocks, z0);
  if (!(margin0 > 1e-6)) {
    std::vector<LmiBlock> ph1_blocks = problem.blocks;
    for (auto& b : ph1_blocks) {
      std::vector<SparseCoeff> eye;
      eye.reserve(b.dim);
      for (int i = 0; i < b.dim; ++i) eye.push_back({i, i, 1.0});
      b.add_var(n, std::move(eye));
    }
    LmiBlock lower;  // s >= -2 keeps phase I bounded below
    lower.dim = 1;
    lower.f0 = Matrix::Constant(1, 1, 2.0);
    lower.add_var(n, {{0, 0, 1.0}});
    ph1_blocks.push_back(lower);

    Vector ph1_cost = Vector::Zero(n + 1);
    ph1_cost(n) = 1.0;
    Matrix ph1_eq(m_eq, n + 1);
    if (m_eq > 0) {
      ph1_eq.leftCols(n) = problem.eq_a;
      ph1_eq.col(n).setZero();
    }
    Vector ph1_z0(n + 1);
    ph1_z0.head(n) = z0;
    ph1_z0(n) = std::max(-margin0, 0.0) + 1.0;

    Vector ph1_z;
    const bool ok = barrier_minimize(
        ph1_blocks, ph1_cost, ph1_eq, ph1_z0, settings_.tolerance * 0.1,
        settings_.max_iterations, out.stats, ph1_z,
        [n](const Vector& z) { return z(n) < kEarlyExitMargin; });
    if (!ok) {
      out.status = SolveStatus::NumericalFailure;
      return out;
    }
    const double s_final = ph1_z(n);
    out.stats.phase1_margin = s_final - out.stats.final_gap;
    if (s_final >= kInfeasibleMargin) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    z0 = ph1_z.head(n);
  } else {
    out.stats.phase1_margin = -margin0;
  }

  // Phase II: follow the central path of the true objective.
  Vector z;
  SolverStats ph2_stats;
  ph2_stats.newton_iterations = out.stats.newton_iterations;
  const bool ok = barrier_minimize(problem.blocks, problem.cost, problem.eq_a, z0,
                                   settings_.tolerance, settings_.max_iterations, ph2_stats, z,
                                   nullptr);
  out.stats.outer_iterations += ph2_stats.outer_iterations;
  out.stats.newton_iterations = ph2_stats.newton_iterations;
  out.stats.final_gap = ph2_stats.final_gap;
  if (!ok) {
    out.status = SolveStatus::NumericalFailure;
    return out;
  }
  out.y = z;
  out.stats.objective = problem.cost.dot(z);
  out.status = SolveStatus::Optimal;
  return out;
}

}  // namespace ddsc
