#pragma once

#include <stdexcept>
#include <string>

namespace ddsc {

/// Shapes of operands do not match the operation's contract.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A matrix required to have full (row or column) rank is numerically rank deficient.
class RankError : public std::runtime_error {
 public:
  explicit RankError(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix required to be Schur stable has spectral radius >= 1.
class UnstableMatrixError : public std::runtime_error {
 public:
  explicit UnstableMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// A data sequence is too short for the requested construction.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Excitation design could not reach the requested PE level.
class ExcitationDesignError : public std::runtime_error {
 public:
  ExcitationDesignError(const std::string& what, double best_level)
      : std::runtime_error(what), best_level(best_level) {}
  double best_level;
};

/// Invalid experiment or module configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Offline warm-start failed, e.g. the offline SDP is infeasible (CLI exit code 3).
class WarmStartError : public std::runtime_error {
 public:
  explicit WarmStartError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ddsc
