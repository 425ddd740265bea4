#include "ddsc/data_window.hpp"

#include "ddsc/errors.hpp"
#include "ddsc/numerics.hpp"

namespace ddsc {

Matrix DataTriple::stacked_w() const {
  Matrix w(u_minus.rows() + x_minus.rows(), u_minus.cols());
  w.topRows(u_minus.rows()) = u_minus;
  w.bottomRows(x_minus.rows()) = x_minus;
  return w;
}

DataWindow::DataWindow(Index capacity, Vector initial_state)
    : capacity_(capacity), latest_state_(std::move(initial_state)) {
  if (capacity_ < 1) throw ConfigError("DataWindow: capacity must be >= 1");
  require(latest_state_.size() > 0, "DataWindow: empty initial state");
}

void DataWindow::push(const Vector& u, const Vector& x_next) {
  require(x_next.size() == latest_state_.size(), "DataWindow::push: state dimension changed");
  if (!entries_.empty()) {
    require(u.size() == entries_.front().u.size(), "DataWindow::push: input dimension changed");
  }
  entries_.push_back({u, latest_state_});
  if (size() > capacity_) entries_.pop_front();
  latest_state_ = x_next;
}

DataTriple DataWindow::snapshot() const {
  if (!full()) {
    throw InsufficientDataError("DataWindow::snapshot: window holds " + std::to_string(size()) +
                                " of " + std::to_string(capacity_) + " samples");
  }
  const Index t = capacity_;
  const Index n_u = entries_.front().u.size();
  const Index n_x = latest_state_.size();
  DataTriple out;
  out.u_minus.resize(n_u, t);
  out.x_minus.resize(n_x, t);
  out.x_plus.resize(n_x, t);
  for (Index p = 0; p < t; ++p) {
    out.u_minus.col(p) = entries_[p].u;
    out.x_minus.col(p) = entries_[p].x;
    out.x_plus.col(p) = (p + 1 < t) ? entries_[p + 1].x : latest_state_;
  }
  return out;
}

Matrix build_hankel(const std::vector<Vector>& seq, int order) {
  if (order < 1) throw ConfigError("build_hankel: order must be >= 1");
  const Index n_samples = static_cast<Index>(seq.size());
  if (n_samples < order) {
    throw InsufficientDataError("build_hankel: sequence of length " + std::to_string(n_samples) +
                                " is shorter than order " + std::to_string(order));
  }
  const Index n = seq.front().size();
  for (const auto& v : seq) require(v.size() == n, "build_hankel: inconsistent vector dimensions");
  const Index cols = n_samples - order + 1;
  Matrix h(n * order, cols);
  for (Index r = 0; r < order; ++r)
    for (Index c = 0; c < cols; ++c)
      h.block(r * n, c, n, 1) = seq[static_cast<std::size_t>(r + c)];
  return h;
}

PeCertificate pe_level(const std::vector<Vector>& seq, int order) {
  Matrix h = build_hankel(seq, order);
  PeCertificate cert;
  cert.order = order;
  cert.sample_count = static_cast<Index>(seq.size());
  cert.level = numerics::min_singular_value(h);
  return cert;
}

RankCondition rank_condition(const DataTriple& t) {
  auto [smin, smax] = numerics::singular_value_range(t.stacked_w());
  RankCondition rc;
  rc.margin = smin;
  rc.ok = smin > numerics::rank_tolerance(smax);
  return rc;
}

WindowDims compute_n(int n_x, int n_u) {
  if (n_x < 1 || n_u < 1) throw ConfigError("compute_n: need n_x, n_u >= 1");
  WindowDims d;
  d.n = (n_x + 1) * n_u + n_x;
  d.t_min = 2 * d.n - 1;
  return d;
}

}  // namespace ddsc
