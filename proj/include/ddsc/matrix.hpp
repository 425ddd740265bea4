#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "ddsc/errors.hpp"

namespace ddsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Absolute/relative tolerance pair. Both nonnegative, not both zero.
struct Tolerance {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;

  Tolerance() = default;
  Tolerance(double abs_tol, double rel_tol) : abs_tol(abs_tol), rel_tol(rel_tol) {
    if (abs_tol < 0.0 || rel_tol < 0.0 || (abs_tol == 0.0 && rel_tol == 0.0)) {
      throw ConfigError("Tolerance: need abs_tol, rel_tol >= 0 and not both zero");
    }
  }

  bool within(double value, double reference) const {
    return std::abs(value - reference) <= abs_tol + rel_tol * std::abs(reference);
  }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DimensionError(what);
}

}  // namespace ddsc
