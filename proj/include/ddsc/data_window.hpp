#pragma once

#include <deque>
#include <vector>

#include "ddsc/matrix.hpp"

namespace ddsc {

/// The three data matrices read out of a full rolling buffer:
/// U_minus = [u(k-T) ... u(k-1)], X_minus = [x(k-T) ... x(k-1)],
/// X_plus  = [x(k-T+1) ... x(k)]. Column p of X_plus is the state one
/// step after column p of X_minus.
struct DataTriple {
  Matrix u_minus;  // n_u x T
  Matrix x_minus;  // n_x x T
  Matrix x_plus;   // n_x x T

  Index samples() const { return u_minus.cols(); }

  /// Stacked W = [U_minus; X_minus], the matrix whose row rank gates the SDP.
  Matrix stacked_w() const;
};

/// Certified persistency-of-excitation level: sigma_min of the order-L
/// block Hankel matrix of the inspected sequence.
struct PeCertificate {
  int order = 0;          // L
  double level = 0.0;     // mu
  Index sample_count = 0;  // N

  /// Whether N satisfies the sample-count bound N >= (n + 1) L + 1 for signals in R^n.
  bool meets_sample_bound(int n) const { return sample_count >= (n + 1) * order + 1; }
};

/// Rolling buffer of the most recent T input-state samples plus the latest state.
/// Pushes are FIFO; negative/offline time indices are abstracted away, only
/// contiguity of pushes matters.
class DataWindow {
 public:
  DataWindow(Index capacity, Vector initial_state);

  /// Record that input u was applied at the current latest state, producing x_next.
  void push(const Vector& u, const Vector& x_next);

  Index capacity() const { return capacity_; }
  Index size() const { return static_cast<Index>(entries_.size()); }
  bool full() const { return size() == capacity_; }
  const Vector& latest_state() const { return latest_state_; }

  /// Data matrices per the buffer contract. Requires a full window.
  DataTriple snapshot() const;

 private:
  struct Entry {
    Vector u;
    Vector x;
  };
  Index capacity_;
  std::deque<Entry> entries_;
  Vector latest_state_;
};

/// Block Hankel matrix of depth L: block (r, c) = seq[r + c], shape (n L) x (N - L + 1).
Matrix build_hankel(const std::vector<Vector>& seq, int order);

/// PE level of a sequence at the given order; throws InsufficientDataError if N < L.
PeCertificate pe_level(const std::vector<Vector>& seq, int order);

/// Full-row-rank test on W = [U_minus; X_minus] with the shared relative
/// threshold; the margin sigma_min(W) is returned for logging either way.
struct RankCondition {
  bool ok = false;
  double margin = 0.0;
};
RankCondition rank_condition(const DataTriple& t);

/// Sample-count constants of the data-length assumption:
/// N = (n_x + 1) n_u + n_x and the minimum window length T_min = 2N - 1.
struct WindowDims {
  int n = 0;
  int t_min = 0;
};
WindowDims compute_n(int n_x, int n_u);

}  // namespace ddsc
