#include "oracles.hpp"

#include <cmath>
#include <complex>

#include "ddsc/numerics.hpp"
#include "ddsc/rng.hpp"

namespace oracles {

Matrix series_lyapunov(const Matrix& a, double beta, int terms) {
  const ddsc::Index n = a.rows();
  Matrix p = Matrix::Zero(n, n);
  Matrix power = Matrix::Identity(n, n);  // A^k
  for (int k = 0; k < terms; ++k) {
    p += beta * power.transpose() * power;
    power = a * power;
  }
  return p;
}

std::pair<double, double> eig2_moduli(const Matrix& a) {
  const double tr = a(0, 0) + a(1, 1);
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
  const std::complex<double> l1 = 0.5 * (tr + disc);
  const std::complex<double> l2 = 0.5 * (tr - disc);
  return {std::abs(l1), std::abs(l2)};
}

Matrix normal_equation_pinv(const Matrix& m) {
  return (m.transpose() * m).inverse() * m.transpose();
}

LqrResult riccati_lqr(const Matrix& a, const Matrix& b, double tol, int max_iter) {
  const ddsc::Index n = a.rows();
  const ddsc::Index m = b.cols();
  LqrResult r;
  r.x = Matrix::Identity(n, n);
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    const Matrix bxb = Matrix::Identity(m, m) + b.transpose() * r.x * b;
    const Matrix next = a.transpose() * r.x * a -
                        a.transpose() * r.x * b * bxb.inverse() * b.transpose() * r.x * a +
                        Matrix::Identity(n, n);
    const double delta = (next - r.x).cwiseAbs().maxCoeff();
    r.x = next;
    if (delta < tol) break;
  }
  const Matrix bxb = Matrix::Identity(m, m) + b.transpose() * r.x * b;
  r.k = -bxb.inverse() * b.transpose() * r.x * a;
  return r;
}

bool hankel_matches_indices(const Matrix& h, const std::vector<Vector>& seq, int order) {
  const ddsc::Index n = seq.front().size();
  const ddsc::Index cols = static_cast<ddsc::Index>(seq.size()) - order + 1;
  if (h.rows() != n * order || h.cols() != cols) return false;
  for (int r = 0; r < order; ++r)
    for (ddsc::Index c = 0; c < cols; ++c)
      for (ddsc::Index i = 0; i < n; ++i)
        if (h(r * n + i, c) != seq[static_cast<std::size_t>(r + c)](i)) return false;
  return true;
}

double quadratic_form(const Vector& x, const Matrix& p) {
  double acc = 0.0;
  for (ddsc::Index i = 0; i < x.size(); ++i)
    for (ddsc::Index j = 0; j < x.size(); ++j) acc += x(i) * p(i, j) * x(j);
  return acc;
}

RandomSystem random_controllable(int n_x, int n_u, std::uint64_t seed, double rho_lo,
                                 double rho_hi) {
  ddsc::Rng rng(ddsc::mix_seed(seed, 0));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix a(n_x, n_x);
    for (ddsc::Index i = 0; i < a.size(); ++i) a(i) = rng.gaussian();
    Matrix b(n_x, n_u);
    for (ddsc::Index i = 0; i < b.size(); ++i) b(i) = rng.gaussian();
    const double rho = ddsc::numerics::spectral_radius(a);
    if (rho < 1e-6) continue;
    a *= rng.uniform(rho_lo, rho_hi) / rho;
    // Controllability via the staircase-free rank test.
    Matrix ctrb(n_x, n_x * n_u);
    Matrix blk = b;
    for (int i = 0; i < n_x; ++i) {
      ctrb.middleCols(i * n_u, n_u) = blk;
      blk = a * blk;
    }
    Eigen::JacobiSVD<Matrix> svd(ctrb);
    const auto& s = svd.singularValues();
    if (s(n_x - 1) > 1e-6 * s(0)) return {a, b};
  }
  throw std::runtime_error("random_controllable: rejection sampling failed");
}

}  // namespace oracles
