#pragma once

#include "ddsc/matrix.hpp"

namespace ddsc::numerics {

/// Relative cutoff below which singular values count as zero:
/// a matrix is treated as full rank iff sigma_min > rank_tolerance(sigma_max).
inline double rank_tolerance(double sigma_max) {
  return 1e-8 * std::max(1.0, sigma_max);
}

/// Smallest singular value of a nonempty matrix.
double min_singular_value(const Matrix& m);

/// Largest singular value (spectral norm).
double spectral_norm(const Matrix& m);

/// Smallest and largest singular values in one decomposition.
std::pair<double, double> singular_value_range(const Matrix& m);

/// True iff sigma_min exceeds the relative rank cutoff.
bool is_full_rank(const Matrix& m);

/// Maximum eigenvalue modulus of a square matrix.
double spectral_radius(const Matrix& m);

/// Unique symmetric P > 0 with A' P A - P = -beta I. Requires spectral_radius(A) < 1.
/// Solved through the Kronecker-vectorized linear system; intended for n <= ~10.
Matrix solve_discrete_lyapunov(const Matrix& a_cl, double beta);

/// Moore-Penrose pseudo-inverse of a full-column-rank matrix, so that pinv(M) * M = I.
/// Throws RankError when sigma_min is below the rank cutoff.
Matrix pseudo_inverse(const Matrix& m);

/// || M - M' ||, spectral norm of the skew part doubled; 0 for symmetric input.
double symmetry_error(const Matrix& m);

/// Minimum eigenvalue of a symmetric matrix (input symmetrized first).
double min_eigenvalue_sym(const Matrix& m);

/// Maximum eigenvalue of a symmetric matrix (input symmetrized first).
double max_eigenvalue_sym(const Matrix& m);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace ddsc::numerics
