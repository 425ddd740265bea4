#pragma once

// Independent reference computations used to freeze expected test values.
// Everything here deliberately avoids the library's implementation paths:
// series summation instead of the Kronecker solve, quadratic formula instead
// of the eigensolver, normal equations instead of the SVD, a Riccati fixed
// point instead of the synthesis program.

#include <vector>

#include "ddsc/matrix.hpp"

namespace oracles {

using ddsc::Matrix;
using ddsc::Vector;

/// sum_{k} beta (A')^k A^k, truncated after `terms` terms.
Matrix series_lyapunov(const Matrix& a, double beta, int terms = 200);

/// Eigenvalue moduli of a 2x2 matrix via the quadratic formula.
std::pair<double, double> eig2_moduli(const Matrix& a);

/// Left pseudo-inverse through the normal equations (M'M)^-1 M'.
Matrix normal_equation_pinv(const Matrix& m);

/// Unit-weight discrete LQR via the Riccati fixed point
/// X <- A'XA - A'XB (I + B'XB)^-1 B'XA + I; returns the gain K with
/// closed loop A + BK.
struct LqrResult {
  Matrix x;
  Matrix k;
  int iterations = 0;
};
LqrResult riccati_lqr(const Matrix& a, const Matrix& b, double tol = 1e-13,
                      int max_iter = 100000);

/// Block Hankel entry check by the direct index formula.
bool hankel_matches_indices(const Matrix& h, const std::vector<Vector>& seq, int order);

/// x' P x by explicit elementwise expansion.
double quadratic_form(const Vector& x, const Matrix& p);

/// Random controllable system draw (rejection sampled), spectral radius of A
/// scaled into [rho_lo, rho_hi].
struct RandomSystem {
  Matrix a;
  Matrix b;
};
RandomSystem random_controllable(int n_x, int n_u, std::uint64_t seed, double rho_lo = 0.3,
                                 double rho_hi = 1.15);

}  // namespace oracles
