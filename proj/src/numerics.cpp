#include "ddsc/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ddsc/errors.hpp"

namespace ddsc::numerics {

double min_singular_value(const Matrix& m) {
  return singular_value_range(m).first;
}

double spectral_norm(const Matrix& m) {
  return singular_value_range(m).second;
}

std::pair<double, double> singular_value_range(const Matrix& m) {
  require(m.rows() > 0 && m.cols() > 0, "singular values of an empty matrix");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return {s(s.size() - 1), s(0)};
}

bool is_full_rank(const Matrix& m) {
  auto [smin, smax] = singular_value_range(m);
  return smin > rank_tolerance(smax);
}

double spectral_radius(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() > 0, "spectral radius of a non-square matrix");
  // Real Schur based solver; only eigenvalue moduli are exposed.
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix solve_discrete_lyapunov(const Matrix& a_cl, double beta) {
  require(a_cl.rows() == a_cl.cols() && a_cl.rows() > 0, "Lyapunov: A must be square");
  if (beta <= 0.0) throw ConfigError("solve_discrete_lyapunov: beta must be positive");
  const double rho = spectral_radius(a_cl);
  if (rho >= 1.0) {
    throw UnstableMatrixError("solve_discrete_lyapunov: spectral radius " + std::to_string(rho) +
                              " >= 1, no unique PSD solution");
  }
  const Index n = a_cl.rows();
  // vec(A' P A) = kron(A', A') vec(P); solve (kron(A', A') - I) vec(P) = -beta vec(I).
  Matrix at = a_cl.transpose();
  Matrix kron(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      kron.block(i * n, j * n, n, n) = at(i, j) * at;
  kron -= Matrix::Identity(n * n, n * n);
  Vector rhs = Vector::Zero(n * n);
  for (Index i = 0; i < n; ++i) rhs(i * n + i) = -beta;
  Vector vec_p = kron.fullPivLu().solve(rhs);
  Matrix p(n, n);
  for (Index j = 0; j < n; ++j) p.col(j) = vec_p.segment(j * n, n);
  return symmetrize(p);
}

Matrix pseudo_inverse(const Matrix& m) {
  require(m.rows() > 0 && m.cols() > 0, "pseudo_inverse of an empty matrix");
  require(m.rows() >= m.cols(), "pseudo_inverse: need rows >= cols for a left inverse");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= rank_tolerance(s(0))) {
    throw RankError("pseudo_inverse: matrix is numerically rank deficient (sigma_min = " +
                    std::to_string(s(s.size() - 1)) + ")");
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

double symmetry_error(const Matrix& m) {
  require(m.rows() == m.cols(), "symmetry_error of a non-square matrix");
  if (m.rows() == 0) return 0.0;
  return (m - m.transpose()).norm();
}

double min_eigenvalue_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  return es.eigenvalues().maxCoeff();
}

}  // namespace ddsc::numerics
