#include "ddsc/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ddsc/errors.hpp"
#include "ddsc/numerics.hpp"
#include "ddsc/rng.hpp"

namespace ddsc {

ModelSideInfo make_model_side_info(const std::vector<Mode>& modes, int t, double eta2,
                                   double w_bar, double rho, std::optional<double> phi,
                                   std::optional<double> mu_rate, double beta_value,
                                   const Matrix& offline_w, std::uint64_t seed,
                                   const SolverBackend& backend) {
  if (modes.empty()) throw ConfigError("make_model_side_info: no modes");
  if (eta2 < 1.0) throw ConfigError("make_model_side_info: eta2 must be >= 1");
  if (beta_value <= 0.0) throw ConfigError("make_model_side_info: beta must be positive");
  ModelSideInfo info;
  info.modes = modes;
  info.t = t;
  info.n_x = static_cast<int>(modes.front().a.rows());
  info.n_u = static_cast<int>(modes.front().b.cols());
  info.eta2 = eta2;
  info.rho = rho;
  info.w_hat = w_bar * rho / std::sqrt(static_cast<double>(info.n_x + 1));
  info.phi = phi;
  info.mu_rate = mu_rate;
  info.offline_w = offline_w;

  // Per-mode gains and optimal values from one noise-free simulation each,
  // staying inside the artifact's own synthesis machinery.
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const Mode& m = modes[i];
    SdpSolution sol;
    bool solved = false;
    for (int attempt = 0; attempt < 5 && !solved; ++attempt) {
      Rng rng(mix_seed(seed, static_cast<std::int64_t>(i * 16 + attempt)));
      Vector x = Vector::Zero(info.n_x);
      DataWindow window(t, x);
      for (int step = 0; step < t; ++step) {
        Vector u(info.n_u);
        for (int j = 0; j < info.n_u; ++j) u(j) = rng.uniform(-1.0, 1.0);
        x = m.a * x + m.b * u;
        window.push(u, x);
      }
      SdpProblemData data(window.snapshot(), 1.0);
      sol = solve_ideal_sdp(data, Matrix::Zero(info.n_x, t), backend);
      if (sol.status == SolveStatus::Optimal) {
        Matrix k = extract_gain(data.u_minus, sol);
        if (numerics::spectral_radius(m.a + m.b * k) < 1.0) {
          info.gains.push_back(std::move(k));
          info.gamma_bar.push_back(sol.gamma);
          info.p_bar.push_back(sol.p);
          solved = true;
        }
      }
    }
    if (!solved) {
      throw ConfigError("make_model_side_info: mode " + std::to_string(i) +
                        " admits no stabilizing solution (gamma_bar missing)");
    }
    info.beta.push_back(beta_value);
  }
  return info;
}

LyapunovFamily compute_lyapunov_family(const ModelSideInfo& info) {
  if (info.gains.size() != info.modes.size() || info.beta.size() != info.modes.size()) {
    throw ConfigError("compute_lyapunov_family: gains/beta incomplete");
  }
  LyapunovFamily fam;
  fam.lambda_min = std::numeric_limits<double>::infinity();
  fam.lambda_max = 0.0;
  for (std::size_t i = 0; i < info.modes.size(); ++i) {
    const Matrix a_cl = info.modes[i].a + info.modes[i].b * info.gains[i];
    Matrix p = numerics::solve_discrete_lyapunov(a_cl, info.beta[i]);
    fam.lambda_min = std::min(fam.lambda_min, numerics::min_eigenvalue_sym(p));
    fam.lambda_max = std::max(fam.lambda_max, numerics::max_eigenvalue_sym(p));
    fam.p.push_back(std::move(p));
  }
  return fam;
}

double compute_omega_bound(const ModelSideInfo& info) {
  double a_max = 0.0;
  for (const auto& m : info.modes) a_max = std::max(a_max, numerics::spectral_norm(m.a));
  const int t = info.t;
  // Scalar majorant of the block lower-triangular propagation matrix: block
  // (r, c), r > c, has norm at most a_max^(r - c - 1); the spectral norm of
  // the majorant bounds the block matrix's norm.
  Matrix omega = Matrix::Zero(t, t);
  for (int r = 1; r < t; ++r)
    for (int c = 0; c < r; ++c) omega(r, c) = std::pow(a_max, r - c - 1);
  return numerics::spectral_norm(omega);
}

BoundReport compute_bounds(const ModelSideInfo& info, const LyapunovFamily& fam,
                           const SupervisorConfig& cfg) {
  if (info.gamma_bar.empty()) throw ConfigError("compute_bounds: gamma_bar missing");
  if (!cfg.delta_x.has_value() || *cfg.delta_x <= 0.0) {
    throw ConfigError("compute_bounds: delta_x must be configured for delta_d2");
  }
  const double t = static_cast<double>(info.t);
  const double n_x = static_cast<double>(info.n_x);

  BoundReport r;
  r.omega_bar = compute_omega_bound(info);
  r.w_hat = info.w_hat;
  for (const auto& m : info.modes) {
    Matrix xi(m.a.rows(), m.a.cols() + m.b.cols());
    xi << m.a, m.b;
    r.xi_bar = std::max(r.xi_bar, numerics::spectral_norm(xi));
  }
  double max_gamma = 0.0;
  for (double g : info.gamma_bar) max_gamma = std::max(max_gamma, g);
  r.max_eta_gamma = info.eta2 * max_gamma;

  if (info.phi.has_value()) {
    r.phi = *info.phi;
  } else {
    // Default: twice the largest ||[K_i' I]'||^2 ||P_i|| over the per-mode
    // ideal solutions.
    double worst = 0.0;
    for (std::size_t i = 0; i < info.gains.size(); ++i) {
      Matrix stacked(info.n_u + info.n_x, info.n_x);
      stacked.topRows(info.n_u) = info.gains[i];
      stacked.bottomRows(info.n_x) = Matrix::Identity(info.n_x, info.n_x);
      const double phi_n = numerics::spectral_norm(stacked);
      worst = std::max(worst, phi_n * phi_n * numerics::spectral_norm(info.p_bar[i]));
    }
    r.phi = 2.0 * worst;
  }

  auto [w_smin, w_smax] = numerics::singular_value_range(info.offline_w);
  r.cond_w = w_smax / w_smin;

  const double slack = 1.0 - 1.0 / info.eta2;
  const double term1 = 1.0 / (2.0 * std::sqrt(t * n_x) * r.omega_bar);
  const double term2 = slack / (24.0 * std::sqrt(t) * r.phi * r.xi_bar * r.cond_w);
  const double term3 = slack / std::sqrt(24.0 * t * std::sqrt(n_x) * r.phi * r.xi_bar * r.omega_bar);
  const double term4 = slack / std::sqrt(24.0 * t * r.phi);
  r.delta_d1 = r.w_hat * std::min({term1, term2, term3, term4});

  double beta_bar = 0.0;
  double delta_a_bar = 0.0;
  for (std::size_t i = 0; i < info.modes.size(); ++i) {
    beta_bar = std::max(beta_bar, info.beta[i]);
    delta_a_bar = std::max(delta_a_bar,
                           numerics::spectral_norm(info.modes[i].a + info.modes[i].b * info.gains[i]));
  }
  const double lp_max = fam.lambda_max;
  const double quad = (-2.0 * lp_max * delta_a_bar +
                       std::sqrt(4.0 * lp_max * lp_max * delta_a_bar * delta_a_bar +
                                 2.0 * lp_max * beta_bar)) /
                      (2.0 * lp_max);
  r.delta_d2 = std::min(r.delta_d1, *cfg.delta_x * quad);

  r.lambda_check = 1.0 - beta_bar / (2.0 * r.max_eta_gamma);

  double dk = 0.0;
  for (double g : info.gamma_bar) dk = std::max(dk, std::sqrt(std::max(0.0, info.eta2 * g - n_x)));
  r.delta_k = dk;

  for (const auto& m : info.modes) {
    const double na = numerics::spectral_norm(m.a);
    const double nb = numerics::spectral_norm(m.b);
    r.c0 = std::max(r.c0, na + nb * r.delta_k);
    r.c1 = std::max(r.c1, na + nb * cfg.delta_eps / *cfg.delta_x);
  }
  r.c = std::max({r.c0, r.c1, 1.0});

  r.phi0 = std::sqrt(r.max_eta_gamma / fam.lambda_min);
  r.lambda_tilde0 = std::sqrt(cfg.lambda0);
  r.mu_rate = info.mu_rate.value_or(0.5 * (r.lambda_tilde0 + 1.0));
  if (!(r.mu_rate > r.lambda_tilde0 && r.mu_rate < 1.0)) {
    throw ConfigError("compute_bounds: mu_rate must lie in (sqrt(lambda0), 1)");
  }
  const double denom = std::log(r.phi0 * std::pow(r.mu_rate / r.lambda_tilde0, t));
  r.tau_bar = denom > 0.0 ? std::log(r.c / r.lambda_tilde0) / denom
                          : std::numeric_limits<double>::infinity();
  return r;
}

Lemma5Report lemma5_timing_check(const std::vector<EventRecord>& event_log,
                                 const std::vector<std::int64_t>& switch_times, int t) {
  Lemma5Report rep;
  for (std::int64_t k_s : switch_times) {
    Lemma5Row row;
    row.switch_time = k_s;
    for (std::size_t i = 0; i < event_log.size(); ++i) {
      if (event_log[i].event != Event::StartKj) continue;
      if (std::llabs(event_log[i].k - k_s) <= 1) {
        row.detected_start = event_log[i].k;
        row.start_aligned = true;
        for (std::size_t j = i + 1; j < event_log.size(); ++j) {
          if (event_log[j].event == Event::EndKjSup) {
            row.detected_end = event_log[j].k;
            row.end_aligned = std::llabs(event_log[j].k - (k_s + t)) <= 1;
            break;
          }
        }
        break;
      }
    }
    rep.all_aligned = rep.all_aligned && row.start_aligned && row.end_aligned;
    rep.rows.push_back(row);
  }
  return rep;
}

IspsReport check_isps(const std::vector<StepRecord>& trajectory, double d_bar, double delta_x) {
  (void)d_bar;
  if (trajectory.empty()) throw ConfigError("check_isps: empty trajectory");
  if (delta_x <= 0.0) throw ConfigError("check_isps: ball radius must be positive");
  IspsReport rep;

  const double x0_norm = trajectory.front().x.norm();
  double sup_norm = 0.0;
  bool finite = true;
  for (const auto& s : trajectory) {
    if (!s.x.allFinite()) finite = false;
    sup_norm = std::max(sup_norm, s.x.norm());
  }
  rep.bounded = finite && sup_norm <= 1e6 * std::max(1.0, x0_norm);

  std::vector<bool> inside(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    inside[i] = trajectory[i].x.norm() <= delta_x;
    if (inside[i] && !rep.entered_ball_at) rep.entered_ball_at = trajectory[i].k;
  }

  // Every escape after the first entry must be followed by a later re-entry.
  rep.reentered_after_escapes = true;
  if (rep.entered_ball_at) {
    std::size_t last_inside = 0;
    for (std::size_t i = 0; i < inside.size(); ++i)
      if (inside[i]) last_inside = i;
    if (last_inside + 1 < inside.size()) rep.reentered_after_escapes = false;
    // A trailing sample just outside the ball is an escape without re-entry.
  }

  // Log-linear envelope over decaying segments: consecutive non-excitation
  // steps with ||x|| above the ball radius.
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  std::size_t seg_start = 0;
  bool in_seg = false;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const bool eligible = trajectory[i].phase != Phase::Excite && !inside[i];
    if (eligible && !in_seg) {
      seg_start = i;
      in_seg = true;
    } else if (!eligible && in_seg) {
      segments.emplace_back(seg_start, i);
      in_seg = false;
    }
  }
  if (in_seg) segments.emplace_back(seg_start, trajectory.size());

  double slope_weighted = 0.0;
  double weight = 0.0;
  double resid_sq = 0.0;
  std::size_t resid_n = 0;
  for (const auto& [lo, hi] : segments) {
    const std::size_t len = hi - lo;
    rep.segment_peaks.push_back(0.0);
    for (std::size_t i = lo; i < hi; ++i)
      rep.segment_peaks.back() = std::max(rep.segment_peaks.back(), trajectory[i].x.norm());
    if (len < 5) continue;
    // least squares log||x|| ~ a + s k
    double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double kk = static_cast<double>(i - lo);
      const double y = std::log(std::max(trajectory[i].x.norm(), 1e-300));
      sk += kk;
      sy += y;
      skk += kk * kk;
      sky += kk * y;
    }
    const double nn = static_cast<double>(len);
    const double denom = nn * skk - sk * sk;
    if (denom <= 0.0) continue;
    const double slope = (nn * sky - sk * sy) / denom;
    const double intercept = (sy - slope * sk) / nn;
    for (std::size_t i = lo; i < hi; ++i) {
      const double kk = static_cast<double>(i - lo);
      const double y = std::log(std::max(trajectory[i].x.norm(), 1e-300));
      const double e = y - (intercept + slope * kk);
      resid_sq += e * e;
      ++resid_n;
    }
    slope_weighted += slope * nn;
    weight += nn;
  }
  rep.fitted_decay_rate = weight > 0.0 ? std::exp(slope_weighted / weight) : 0.0;
  rep.fit_residual = resid_n > 0 ? std::sqrt(resid_sq / static_cast<double>(resid_n)) : 0.0;

  // Practical floor: the typical state magnitude while inside the ball.
  std::vector<double> inside_norms;
  for (std::size_t i = 0; i < trajectory.size(); ++i)
    if (inside[i]) inside_norms.push_back(trajectory[i].x.norm());
  if (!inside_norms.empty()) {
    std::nth_element(inside_norms.begin(), inside_norms.begin() + inside_norms.size() / 2,
                     inside_norms.end());
    rep.offset = inside_norms[inside_norms.size() / 2];
  }
  rep.c0 = rep.offset + delta_x;

  rep.verdict = rep.bounded && rep.entered_ball_at.has_value() && rep.reentered_after_escapes &&
                rep.fitted_decay_rate < 1.0 && rep.fit_residual <= 2.0;
  return rep;
}

}  // namespace ddsc
