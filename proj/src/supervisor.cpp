#include "ddsc/supervisor.hpp"

#include "ddsc/errors.hpp"
#include "ddsc/numerics.hpp"
#include "ddsc/rng.hpp"

namespace ddsc {

void SupervisorConfig::validate() const {
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw ConfigError("supervisor: lambda0 must be in (0,1)");
  if (!(delta_v > 0.0)) throw ConfigError("supervisor: delta_V must be positive");
  if (!(delta_eps > 0.0)) throw ConfigError("supervisor: delta_eps must be positive");
  if (delta_x && *delta_x < 0.0) throw ConfigError("supervisor: delta_x must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("supervisor: alpha must be positive");
  if (n_x < 1 || n_u < 1) throw ConfigError("supervisor: state/input dimensions unset");
  if (n < 1) throw ConfigError("supervisor: excitation length N unset");
  if (t < 2 * n - 1) {
    throw ConfigError("supervisor: window length T = " + std::to_string(t) +
                      " violates T >= 2N - 1 = " + std::to_string(2 * n - 1));
  }
  if (pe_target < 0.0) throw ConfigError("supervisor: pe_target must be >= 0");
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Excite: return "excite";
    case Phase::Solve: return "solve";
    case Phase::Hold: return "hold";
    case Phase::Dormant: return "dormant";
  }
  return "?";
}

const char* to_string(Event e) {
  switch (e) {
    case Event::None: return "none";
    case Event::StartKj: return "start_kj";
    case Event::EndKjSup: return "end_kj_sup";
    case Event::DormantEntry: return "dormant_entry";
    case Event::DormantExit: return "dormant_exit";
  }
  return "?";
}

double auxiliary_value(const Vector& x, const Matrix& p) {
  require(p.rows() == p.cols() && p.rows() == x.size(), "auxiliary_value: dimension mismatch");
  return x.dot(p * x);
}

namespace {

bool dormant_condition(double v, double x_norm, const SupervisorConfig& cfg) {
  if (v <= cfg.delta_v) return true;
  return cfg.delta_x && x_norm <= *cfg.delta_x;
}

}  // namespace

Event detect_event(const std::deque<double>& v_hist, double v_now, double x_norm,
                   const SupervisorConfig& cfg) {
  if (dormant_condition(v_now, x_norm, cfg)) return Event::DormantEntry;
  if (v_hist.size() < 2) return Event::None;
  const double v1 = v_hist.back();                 // V(k-1)
  const double v2 = v_hist[v_hist.size() - 2];     // V(k-2)
  const bool grew = v_now > cfg.lambda0 * v1;
  const bool was_decaying = v1 <= cfg.lambda0 * v2;
  if (grew && was_decaying) return Event::StartKj;
  if (!grew && !was_decaying) return Event::EndKjSup;
  return Event::None;
}

std::pair<std::vector<Vector>, PeCertificate> generate_excitation(int n_u, int n_x, int n,
                                                                  double delta_eps,
                                                                  double pe_target,
                                                                  std::uint64_t seed) {
  if (n_u < 1 || n_x < 1 || n < 1) throw ConfigError("generate_excitation: bad dimensions");
  if (delta_eps <= 0.0) throw ConfigError("generate_excitation: delta_eps must be positive");
  const int order = n_x + 1;
  std::vector<Vector> best_seq;
  PeCertificate best;
  best.level = -1.0;
  constexpr int kAttempts = 100;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(mix_seed(seed, attempt));
    std::vector<Vector> seq;
    seq.reserve(n);
    for (int i = 0; i < n; ++i) seq.push_back(rng.uniform_ball(n_u, delta_eps));
    PeCertificate cert = (n >= order) ? pe_level(seq, order) : pe_level(seq, n);
    if (cert.level > best.level) {
      best = cert;
      best_seq = std::move(seq);
    }
    if (best.level >= pe_target) return {best_seq, best};
  }
  throw ExcitationDesignError(
      "generate_excitation: level " + std::to_string(best.level) + " after " +
          std::to_string(kAttempts) + " attempts, target " + std::to_string(pe_target),
      best.level);
}

SupervisorState warm_start(const DataTriple& offline_triple, const SupervisorConfig& cfg,
                           const SolverBackend& backend, const SolveObserver& observer) {
  cfg.validate();
  require(offline_triple.u_minus.rows() == cfg.n_u && offline_triple.x_minus.rows() == cfg.n_x,
          "warm_start: data dimensions disagree with the configuration");
  if (offline_triple.samples() != cfg.t) {
    throw ConfigError("warm_start: offline window holds " +
                      std::to_string(offline_triple.samples()) + " samples, expected T = " +
                      std::to_string(cfg.t));
  }
  SdpProblemData data(offline_triple, cfg.alpha);
  SdpSolution sol;
  try {
    sol = solve_robust_sdp(data, backend);
  } catch (const std::exception& e) {
    throw WarmStartError(std::string("warm_start: offline solve failed: ") + e.what());
  }
  if (observer) observer(-1, data, sol);
  if (sol.status != SolveStatus::Optimal) {
    throw WarmStartError(std::string("warm_start: offline program ") + to_string(sol.status) +
                         " (rank margin " + std::to_string(sol.stats.rank_margin) + ")");
  }
  SupervisorState st;
  st.phase = Phase::Hold;
  st.p = sol.p;
  st.q = sol.q;
  st.k_gain = extract_gain(offline_triple.u_minus, sol);
  st.k = 0;
  return st;
}

namespace {

void enter_excitation(SupervisorState& st, const SupervisorConfig& cfg, std::int64_t k) {
  auto [seq, cert] = generate_excitation(cfg.n_u, cfg.n_x, cfg.n, cfg.delta_eps, cfg.pe_target,
                                         mix_seed(cfg.excitation_seed, k));
  (void)cert;
  st.excitation = std::move(seq);
  st.excite_emitted = 0;
  st.phase = Phase::Excite;
}

}  // namespace

std::pair<ControlDecision, SupervisorState> control_step(
    const SupervisorState& st_in, const Vector& x, const DataWindow& window,
    const SupervisorConfig& cfg, const SolverBackend& backend, const SolveObserver& observer) {
  SupervisorState st = st_in;
  const std::int64_t k = st.k;
  ControlDecision dec;
  const double x_norm = x.norm();

  // Excitation windows run to completion: exactly N emissions, no event handling.
  if (st.phase == Phase::Excite && st.excite_emitted >= cfg.n) st.phase = Phase::Solve;

  switch (st.phase) {
    case Phase::Excite: {
      dec.u = st.excitation[static_cast<std::size_t>(st.excite_emitted)];
      ++st.excite_emitted;
      dec.aux_value = auxiliary_value(x, st.p);
      dec.event = Event::None;
      break;
    }
    case Phase::Solve: {
      // Solve first: the aux value and the end-of-window test use the P
      // updated at this step, matching the update rule's closed interval.
      SdpProblemData data(window.snapshot(), cfg.alpha);
      SdpSolution sol = solve_robust_sdp(data, backend);
      if (observer) observer(k, data, sol);
      dec.solved_sdp = true;
      if (sol.status == SolveStatus::Optimal) {
        dec.feasible = true;
        dec.gamma = sol.gamma;
        st.p = sol.p;
        st.q = sol.q;
        st.k_gain = extract_gain(data.u_minus, sol);
      }
      // Infeasible or failed solves keep the previous (K, P, Q) and stay in
      // the solving phase; the outcome is logged by the caller.
      const double v = auxiliary_value(x, st.p);
      dec.aux_value = v;
      dec.event = detect_event(st.v_hist, v, x_norm, cfg);
      if (dec.event == Event::DormantEntry) {
        st.phase = Phase::Dormant;
        st.event_log.push_back({k, Event::DormantEntry});
      } else if (dec.event == Event::EndKjSup) {
        st.phase = Phase::Hold;
        st.event_log.push_back({k, Event::EndKjSup});
      } else {
        dec.event = Event::None;  // StartKj inside a solving phase is not acted on
      }
      dec.u = st.k_gain * x;
      break;
    }
    case Phase::Hold: {
      const double v = auxiliary_value(x, st.p);
      dec.aux_value = v;
      dec.event = detect_event(st.v_hist, v, x_norm, cfg);
      if (dec.event == Event::DormantEntry) {
        st.phase = Phase::Dormant;
        st.event_log.push_back({k, Event::DormantEntry});
        dec.u = st.k_gain * x;
      } else if (dec.event == Event::StartKj) {
        st.event_log.push_back({k, Event::StartKj});
        enter_excitation(st, cfg, k);
        dec.u = st.excitation.front();
        st.excite_emitted = 1;
      } else {
        dec.event = Event::None;
        dec.u = st.k_gain * x;
      }
      break;
    }
    case Phase::Dormant: {
      const double v = auxiliary_value(x, st.p);
      dec.aux_value = v;
      if (!dormant_condition(v, x_norm, cfg)) {
        // The state escaped the dormancy ball: the held gain may be stale
        // (a switch can occur unnoticed while dormant), so a fresh
        // excitation-solve cycle starts immediately.
        dec.event = Event::DormantExit;
        st.event_log.push_back({k, Event::DormantExit});
        st.event_log.push_back({k, Event::StartKj});
        enter_excitation(st, cfg, k);
        dec.u = st.excitation.front();
        st.excite_emitted = 1;
      } else {
        dec.event = Event::None;
        dec.u = st.k_gain * x;
      }
      break;
    }
  }

  st.v_hist.push_back(dec.aux_value);
  while (st.v_hist.size() > 3) st.v_hist.pop_front();
  st.k = k + 1;
  dec.phase_after = st.phase;
  return {std::move(dec), std::move(st)};
}

}  // namespace ddsc
