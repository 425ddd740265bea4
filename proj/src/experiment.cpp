#include "ddsc/experiment.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddsc/data_window.hpp"
#include "ddsc/errors.hpp"
#include "ddsc/numerics.hpp"
#include "ddsc/svg_plot.hpp"

namespace ddsc {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// JSON helpers with field-path error reporting.

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config field '" + path + "': " + what);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

template <typename T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return get_as<T>(*it, path + "." + key);
}

template <typename T>
std::optional<T> get_opt(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return get_as<T>(*it, path + "." + key);
}

Matrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) fail(path, "expected nested array");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) fail(path, "ragged rows");
    for (Index c = 0; c < cols; ++c)
      m(r, c) = get_as<double>(row[static_cast<std::size_t>(c)], path);
  }
  if (!m.allFinite()) fail(path, "non-finite entry");
  return m;
}

Vector parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = get_as<double>(j[static_cast<std::size_t>(i)], path);
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

Plant ExperimentConfig::build_plant() const {
  if (fault.has_value()) {
    return Plant(FaultSchedule(fault->a, fault->b, fault->d, fault->beta_segments,
                               fault->actuator_segments));
  }
  return Plant(SwitchedSystem(modes), SwitchingSchedule(switch_times, switch_modes));
}

DisturbanceModel ExperimentConfig::build_disturbance(int n_x) const {
  if (disturbance.kind == "zero") return DisturbanceModel::zero(n_x);
  if (disturbance.kind == "uniform_ball") {
    return DisturbanceModel::uniform_ball(n_x, disturbance.bound, disturbance.seed);
  }
  if (disturbance.kind == "fixed_sequence") {
    return DisturbanceModel::fixed_sequence(disturbance.sequence, disturbance.bound);
  }
  throw ConfigError("disturbance.kind must be zero | uniform_ball | fixed_sequence, got '" +
                    disturbance.kind + "'");
}

SupervisorConfig ExperimentConfig::resolve_supervisor() const {
  const Plant plant = build_plant();
  const WindowDims dims = compute_n(plant.n_x(), plant.n_u());
  SupervisorConfig cfg;
  cfg.lambda0 = supervisor.lambda0;
  cfg.delta_v = supervisor.delta_v;
  cfg.delta_eps = supervisor.delta_eps;
  cfg.delta_x = supervisor.delta_x;
  cfg.alpha = supervisor.alpha;
  cfg.n = dims.n;
  cfg.t = supervisor.t.value_or(dims.t_min);
  cfg.n_x = plant.n_x();
  cfg.n_u = plant.n_u();
  cfg.excitation_seed = supervisor.excitation_seed;
  cfg.pe_target = supervisor.pe_target;
  cfg.validate();
  return cfg;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> warnings;
  if (fault.has_value() == !modes.empty()) {
    throw ConfigError("config: exactly one of system.modes and fault_system must be given");
  }
  const SupervisorConfig sup = resolve_supervisor();  // throws on T < 2N - 1 etc.
  if (horizon < sup.t) throw ConfigError("config: horizon must be >= T");
  const Plant plant = build_plant();
  if (!fault.has_value()) {
    const auto status = plant.schedule()->validate_dwell(sup.t);
    if (status == SwitchingSchedule::DwellStatus::WarnEqual) {
      warnings.push_back("dwell time equals T; the dwell-time assumption requires tau > T");
    } else if (status == SwitchingSchedule::DwellStatus::Violation) {
      warnings.push_back("dwell time below T violates the dwell-time assumption");
    }
    if (offline.mode != plant.mode_at(0)) {
      warnings.push_back("offline data mode differs from the mode active at k = 0");
    }
  }
  if (offline.x_start.size() != plant.n_x()) {
    throw ConfigError("offline.x_start: expected length " + std::to_string(plant.n_x()));
  }
  if (offline.length && *offline.length < sup.t) {
    throw ConfigError("offline.length must be >= T");
  }
  if (analysis.enabled && analysis.isps_ball_radius <= 0.0) {
    warnings.push_back("analysis.isps_ball_radius unset; the empirical stability check is skipped");
  }
  return warnings;
}

// ---------------------------------------------------------------------------
// Config <-> JSON

namespace {

ExperimentConfig parse_config(const json& j, const std::string& origin) {
  ExperimentConfig cfg;
  cfg.name = get_or<std::string>(j, "name", origin, "experiment");
  if (j.contains("system") && j.contains("fault_system")) {
    fail(origin, "give either system or fault_system, not both");
  }
  if (j.contains("system")) {
    const json& sys = member(j, "system", origin);
    const json& modes = member(sys, "modes", origin + ".system");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string p = origin + ".system.modes[" + std::to_string(i) + "]";
      Mode m;
      m.a = parse_matrix(member(modes[i], "A", p), p + ".A");
      m.b = parse_matrix(member(modes[i], "B", p), p + ".B");
      cfg.modes.push_back(std::move(m));
    }
    const json& sw = member(sys, "switching", origin + ".system");
    cfg.switch_times = get_as<std::vector<std::int64_t>>(member(sw, "times", origin), origin);
    cfg.switch_modes = get_as<std::vector<int>>(member(sw, "modes", origin), origin);
  } else if (j.contains("fault_system")) {
    const json& fs = member(j, "fault_system", origin);
    const std::string p = origin + ".fault_system";
    ExperimentConfig::FaultSpec spec;
    spec.a = parse_matrix(member(fs, "A", p), p + ".A");
    spec.b = parse_matrix(member(fs, "B", p), p + ".B");
    spec.d = parse_matrix(member(fs, "D", p), p + ".D");
    for (const auto& seg : member(fs, "beta", p)) {
      FaultSchedule::BetaSegment s;
      s.from = get_as<std::int64_t>(member(seg, "from", p), p);
      s.to = get_opt<std::int64_t>(seg, "to", p);
      s.beta = get_as<double>(member(seg, "value", p), p);
      spec.beta_segments.push_back(s);
    }
    for (const auto& seg : member(fs, "actuators", p)) {
      FaultSchedule::ActuatorSegment s;
      s.from = get_as<std::int64_t>(member(seg, "from", p), p);
      s.to = get_opt<std::int64_t>(seg, "to", p);
      s.alpha = parse_vector(member(seg, "mask", p), p + ".mask");
      spec.actuator_segments.push_back(std::move(s));
    }
    cfg.fault = std::move(spec);
  } else {
    fail(origin, "missing system or fault_system");
  }

  const json& dist = member(j, "disturbance", origin);
  cfg.disturbance.kind = get_or<std::string>(dist, "kind", origin + ".disturbance", "zero");
  cfg.disturbance.bound = get_or<double>(dist, "bound", origin + ".disturbance", 0.0);
  cfg.disturbance.seed = get_or<std::uint64_t>(dist, "seed", origin + ".disturbance", 0);
  if (dist.contains("sequence")) {
    for (const auto& v : dist["sequence"]) {
      cfg.disturbance.sequence.push_back(parse_vector(v, origin + ".disturbance.sequence"));
    }
  }

  const json& sup = member(j, "supervisor", origin);
  const std::string sp = origin + ".supervisor";
  cfg.supervisor.lambda0 = get_as<double>(member(sup, "lambda0", sp), sp + ".lambda0");
  cfg.supervisor.delta_v = get_as<double>(member(sup, "delta_V", sp), sp + ".delta_V");
  cfg.supervisor.delta_eps = get_as<double>(member(sup, "delta_eps", sp), sp + ".delta_eps");
  cfg.supervisor.delta_x = get_opt<double>(sup, "delta_x", sp);
  cfg.supervisor.alpha = get_or<double>(sup, "alpha", sp, 1.0);
  cfg.supervisor.t = get_opt<int>(sup, "T", sp);
  cfg.supervisor.pe_target = get_or<double>(sup, "pe_target", sp, 0.0);
  cfg.supervisor.excitation_seed = get_or<std::uint64_t>(sup, "excitation_seed", sp, 0);

  cfg.horizon = get_as<std::int64_t>(member(j, "horizon", origin), origin + ".horizon");

  const json& off = member(j, "offline", origin);
  const std::string op = origin + ".offline";
  cfg.offline.mode = get_or<int>(off, "mode", op, 0);
  cfg.offline.input_range = get_as<double>(member(off, "input_range", op), op + ".input_range");
  cfg.offline.length = get_opt<int>(off, "length", op);
  cfg.offline.seed = get_or<std::uint64_t>(off, "seed", op, 1);
  cfg.offline.x_start = parse_vector(member(off, "x_start", op), op + ".x_start");

  if (j.contains("analysis")) {
    const json& an = j["analysis"];
    const std::string ap = origin + ".analysis";
    cfg.analysis.enabled = get_or<bool>(an, "enabled", ap, true);
    cfg.analysis.bounds_enabled = get_or<bool>(an, "bounds", ap, true);
    cfg.analysis.eta2 = get_or<double>(an, "eta2", ap, 2.0);
    cfg.analysis.rho = get_or<double>(an, "rho", ap, 1.0);
    cfg.analysis.beta = get_or<double>(an, "beta", ap, 1.0);
    cfg.analysis.phi = get_opt<double>(an, "phi", ap);
    cfg.analysis.mu_rate = get_opt<double>(an, "mu_rate", ap);
    cfg.analysis.bounds_delta_x = get_opt<double>(an, "bounds_delta_x", ap);
    cfg.analysis.isps_ball_radius = get_or<double>(an, "isps_ball_radius", ap, 0.0);
  }
  if (j.contains("output")) {
    cfg.out_dir = get_or<std::string>(j["output"], "dir", origin + ".output", "out");
  }
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str(), path);
}

ExperimentConfig config_from_json_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + origin + ": " + e.what());
  }
  return parse_config(j, origin);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  if (cfg.fault.has_value()) {
    json fs;
    fs["A"] = matrix_to_json(cfg.fault->a);
    fs["B"] = matrix_to_json(cfg.fault->b);
    fs["D"] = matrix_to_json(cfg.fault->d);
    json betas = json::array();
    for (const auto& s : cfg.fault->beta_segments) {
      json seg;
      seg["from"] = s.from;
      if (s.to) seg["to"] = *s.to;
      seg["value"] = s.beta;
      betas.push_back(seg);
    }
    fs["beta"] = betas;
    json acts = json::array();
    for (const auto& s : cfg.fault->actuator_segments) {
      json seg;
      seg["from"] = s.from;
      if (s.to) seg["to"] = *s.to;
      seg["mask"] = vector_to_json(s.alpha);
      acts.push_back(seg);
    }
    fs["actuators"] = acts;
    j["fault_system"] = fs;
  } else {
    json sys;
    json modes = json::array();
    for (const auto& m : cfg.modes) {
      json mode;
      mode["A"] = matrix_to_json(m.a);
      mode["B"] = matrix_to_json(m.b);
      modes.push_back(mode);
    }
    sys["modes"] = modes;
    sys["switching"]["times"] = cfg.switch_times;
    sys["switching"]["modes"] = cfg.switch_modes;
    j["system"] = sys;
  }
  j["disturbance"]["kind"] = cfg.disturbance.kind;
  j["disturbance"]["bound"] = cfg.disturbance.bound;
  j["disturbance"]["seed"] = cfg.disturbance.seed;
  if (!cfg.disturbance.sequence.empty()) {
    json seq = json::array();
    for (const auto& v : cfg.disturbance.sequence) seq.push_back(vector_to_json(v));
    j["disturbance"]["sequence"] = seq;
  }
  j["supervisor"]["lambda0"] = cfg.supervisor.lambda0;
  j["supervisor"]["delta_V"] = cfg.supervisor.delta_v;
  j["supervisor"]["delta_eps"] = cfg.supervisor.delta_eps;
  if (cfg.supervisor.delta_x) j["supervisor"]["delta_x"] = *cfg.supervisor.delta_x;
  j["supervisor"]["alpha"] = cfg.supervisor.alpha;
  if (cfg.supervisor.t) j["supervisor"]["T"] = *cfg.supervisor.t;
  j["supervisor"]["pe_target"] = cfg.supervisor.pe_target;
  j["supervisor"]["excitation_seed"] = cfg.supervisor.excitation_seed;
  j["horizon"] = cfg.horizon;
  j["offline"]["mode"] = cfg.offline.mode;
  j["offline"]["input_range"] = cfg.offline.input_range;
  if (cfg.offline.length) j["offline"]["length"] = *cfg.offline.length;
  j["offline"]["seed"] = cfg.offline.seed;
  j["offline"]["x_start"] = vector_to_json(cfg.offline.x_start);
  j["analysis"]["enabled"] = cfg.analysis.enabled;
  j["analysis"]["bounds"] = cfg.analysis.bounds_enabled;
  j["analysis"]["eta2"] = cfg.analysis.eta2;
  j["analysis"]["rho"] = cfg.analysis.rho;
  j["analysis"]["beta"] = cfg.analysis.beta;
  if (cfg.analysis.phi) j["analysis"]["phi"] = *cfg.analysis.phi;
  if (cfg.analysis.mu_rate) j["analysis"]["mu_rate"] = *cfg.analysis.mu_rate;
  if (cfg.analysis.bounds_delta_x) j["analysis"]["bounds_delta_x"] = *cfg.analysis.bounds_delta_x;
  j["analysis"]["isps_ball_radius"] = cfg.analysis.isps_ball_radius;
  j["output"]["dir"] = cfg.out_dir;
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

// ---------------------------------------------------------------------------
// Runner

TrajectoryLog run_experiment(const ExperimentConfig& cfg, const SolverBackend& backend,
                             const SolveObserver& observer) {
  TrajectoryLog log;
  log.warnings = cfg.validate();
  log.cfg_hash = config_hash(cfg);
  log.version = kVersion;

  const Plant plant = cfg.build_plant();
  const DisturbanceModel dist = cfg.build_disturbance(plant.n_x());
  const SupervisorConfig sup_cfg = cfg.resolve_supervisor();
  log.sup_cfg = sup_cfg;

  // Track exact solver outcomes (the decision only carries feasibility).
  SolveObserver counting = [&](std::int64_t k, const SdpProblemData& data,
                               const SdpSolution& sol) {
    if (sol.status == SolveStatus::NumericalFailure) ++log.sdp_failures;
    if (observer) observer(k, data, sol);
  };

  // Offline phase: excite the mode active at time 0 and fill the window.
  const int offline_len = cfg.offline.length.value_or(sup_cfg.t);
  const OfflineTrajectory offline = generate_offline_trajectory(
      plant.matrices_at(0), dist, cfg.offline.x_start, offline_len, cfg.offline.input_range,
      cfg.offline.seed);
  DataWindow window(sup_cfg.t, offline.states.front());
  for (std::size_t i = 0; i < offline.inputs.size(); ++i) {
    window.push(offline.inputs[i], offline.states[i + 1]);
  }
  log.offline_w = window.snapshot().stacked_w();

  SupervisorState sup = warm_start(window.snapshot(), sup_cfg, backend, counting);

  Vector x = window.latest_state();
  for (std::int64_t k = 0; k < cfg.horizon; ++k) {
    const double margin = rank_condition(window.snapshot()).margin;
    auto [dec, sup_next] = control_step(sup, x, window, sup_cfg, backend, counting);
    sup = std::move(sup_next);
    if (dec.solved_sdp) {
      ++log.sdp_solves;
      if (dec.feasible) {
        ++log.sdp_optimal;
      } else {
        ++log.sdp_infeasible;  // includes numerical failures; see summary counters
      }
    }
    const StepResult sr = plant.step(dist, {k, x}, dec.u);

    StepRecord rec;
    rec.k = k;
    rec.x = x;
    rec.u = dec.u;
    rec.mode = sr.mode;
    rec.phase = dec.phase_after;
    rec.event = dec.event;
    rec.aux_value = dec.aux_value;
    rec.w_sigma_min = margin;
    rec.solved = dec.solved_sdp;
    rec.feasible = dec.feasible;
    rec.gamma = dec.gamma;
    rec.gain_norm = sup.k_gain.norm();
    rec.disturbance = sr.disturbance;
    log.steps.push_back(std::move(rec));

    window.push(dec.u, sr.next.x);
    x = sr.next.x;
  }

  StepRecord last;
  last.k = cfg.horizon;
  last.x = x;
  last.u = Vector::Constant(plant.n_u(), std::numeric_limits<double>::quiet_NaN());
  last.mode = plant.mode_at(cfg.horizon);
  last.phase = sup.phase;
  last.aux_value = auxiliary_value(x, sup.p);
  last.w_sigma_min = rank_condition(window.snapshot()).margin;
  log.steps.push_back(std::move(last));

  log.events = sup.event_log;
  for (std::int64_t s : plant.switch_times()) {
    if (s <= cfg.horizon) log.true_switches.push_back(s);
  }
  return log;
}

RunSummary summarize(const TrajectoryLog& log, const ExperimentConfig& cfg,
                     const SolverBackend& backend) {
  RunSummary s;
  s.warnings = log.warnings;
  if (!cfg.analysis.enabled) return s;

  s.lemma5 = lemma5_timing_check(log.events, log.true_switches, log.sup_cfg.t);

  if (cfg.analysis.isps_ball_radius > 0.0) {
    s.isps = check_isps(log.steps, cfg.disturbance.bound, cfg.analysis.isps_ball_radius);
  } else {
    s.warnings.push_back("isps check skipped: isps_ball_radius not set");
  }

  if (cfg.analysis.bounds_enabled) {
    try {
      const Plant plant = cfg.build_plant();
      ModelSideInfo info = make_model_side_info(
          plant.realized_modes(), log.sup_cfg.t, cfg.analysis.eta2, log.sup_cfg.pe_target,
          cfg.analysis.rho, cfg.analysis.phi, cfg.analysis.mu_rate, cfg.analysis.beta,
          log.offline_w, 71, backend);
      SupervisorConfig bounds_cfg = log.sup_cfg;
      if (cfg.analysis.bounds_delta_x) bounds_cfg.delta_x = *cfg.analysis.bounds_delta_x;
      LyapunovFamily fam = compute_lyapunov_family(info);
      s.bounds = compute_bounds(info, fam, bounds_cfg);
    } catch (const std::exception& e) {
      s.warnings.push_back(std::string("bound report unavailable: ") + e.what());
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Emission

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json isps_to_json(const IspsReport& r) {
  json j;
  j["segment_peaks"] = r.segment_peaks;
  j["fitted_decay_rate"] = r.fitted_decay_rate;
  j["fit_residual"] = r.fit_residual;
  j["offset"] = r.offset;
  j["c0"] = r.c0;
  if (r.entered_ball_at) j["entered_ball_at"] = *r.entered_ball_at;
  j["bounded"] = r.bounded;
  j["reentered_after_escapes"] = r.reentered_after_escapes;
  j["verdict"] = r.verdict;
  return j;
}

json bounds_to_json(const BoundReport& r) {
  json j;
  j["omega_bar"] = r.omega_bar;
  j["xi_bar"] = r.xi_bar;
  j["w_hat"] = r.w_hat;
  j["cond_w"] = r.cond_w;
  j["phi"] = r.phi;
  j["delta_d1"] = r.delta_d1;
  j["delta_d2"] = r.delta_d2;
  j["lambda_check"] = r.lambda_check;
  j["delta_K"] = r.delta_k;
  j["C0"] = r.c0;
  j["C1"] = r.c1;
  j["C"] = r.c;
  j["phi0"] = r.phi0;
  j["lambda_tilde0"] = r.lambda_tilde0;
  j["mu_rate"] = r.mu_rate;
  j["tau_bar"] = finite_or(r.tau_bar, 1e308);
  j["max_eta_gamma"] = r.max_eta_gamma;
  return j;
}

json lemma5_to_json(const Lemma5Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["switch_time"] = row.switch_time;
    if (row.detected_start) jr["detected_start"] = *row.detected_start;
    if (row.detected_end) jr["detected_end"] = *row.detected_end;
    jr["start_aligned"] = row.start_aligned;
    jr["end_aligned"] = row.end_aligned;
    rows.push_back(jr);
  }
  json j;
  j["rows"] = rows;
  j["all_aligned"] = r.all_aligned;
  return j;
}

}  // namespace

std::string trajectory_csv(const TrajectoryLog& log) {
  if (log.steps.empty()) return "";
  const Index n_x = log.steps.front().x.size();
  const Index n_u = log.steps.front().u.size();
  std::ostringstream out;
  out << "k";
  for (Index i = 1; i <= n_x; ++i) out << ",x_" << i;
  for (Index i = 1; i <= n_u; ++i) out << ",u_" << i;
  out << ",mode,phase,aux_value,w_sigma_min,solved,feasible,gamma\n";
  for (const auto& s : log.steps) {
    out << s.k;
    for (Index i = 0; i < n_x; ++i) out << "," << fmt_double(s.x(i));
    for (Index i = 0; i < n_u; ++i) out << "," << fmt_double(s.u(i));
    out << "," << s.mode << "," << to_string(s.phase) << "," << fmt_double(s.aux_value) << ","
        << fmt_double(s.w_sigma_min) << "," << (s.solved ? 1 : 0) << "," << (s.feasible ? 1 : 0)
        << "," << fmt_double(s.gamma) << "\n";
  }
  return out.str();
}

std::vector<StepRecord> parse_trajectory_csv(const std::string& csv) {
  std::vector<StepRecord> out;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trajectory csv: empty");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string field;
    while (std::getline(h, field, ',')) header.push_back(field);
  }
  Index n_x = 0, n_u = 0;
  for (const auto& f : header) {
    if (f.rfind("x_", 0) == 0) ++n_x;
    if (f.rfind("u_", 0) == 0) ++n_u;
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != header.size()) throw ConfigError("trajectory csv: ragged row");
    StepRecord r;
    std::size_t i = 0;
    r.k = std::stoll(fields[i++]);
    r.x.resize(n_x);
    for (Index c = 0; c < n_x; ++c) r.x(c) = std::stod(fields[i++]);
    r.u.resize(n_u);
    for (Index c = 0; c < n_u; ++c) r.u(c) = std::stod(fields[i++]);
    r.mode = std::stoi(fields[i++]);
    const std::string& phase = fields[i++];
    r.phase = phase == "excite"   ? Phase::Excite
              : phase == "solve"  ? Phase::Solve
              : phase == "hold"   ? Phase::Hold
                                  : Phase::Dormant;
    r.aux_value = std::stod(fields[i++]);
    r.w_sigma_min = std::stod(fields[i++]);
    r.solved = fields[i++] == "1";
    r.feasible = fields[i++] == "1";
    r.gamma = std::stod(fields[i++]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_json(const TrajectoryLog& log, const RunSummary& summary,
                         const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["metadata"]["config_hash"] = log.cfg_hash;
  j["metadata"]["version"] = log.version;
  j["metadata"]["seeds"]["disturbance"] = cfg.disturbance.seed;
  j["metadata"]["seeds"]["offline"] = cfg.offline.seed;
  j["metadata"]["seeds"]["excitation"] = cfg.supervisor.excitation_seed;
  j["sdp"]["solves"] = log.sdp_solves;
  j["sdp"]["optimal"] = log.sdp_optimal;
  j["sdp"]["not_optimal"] = log.sdp_infeasible;
  j["sdp"]["numerical_failures"] = log.sdp_failures;
  j["warnings"] = summary.warnings;
  json events = json::array();
  for (const auto& e : log.events) {
    json je;
    je["k"] = e.k;
    je["event"] = to_string(e.event);
    events.push_back(je);
  }
  j["event_log"] = events;
  json steps = json::array();
  for (const auto& s : log.steps) {
    json js;
    js["k"] = s.k;
    js["phase"] = to_string(s.phase);
    js["event"] = to_string(s.event);
    js["solved_sdp"] = s.solved;
    js["feasible"] = s.feasible;
    js["gamma"] = finite_or(s.gamma, -1.0);
    js["aux_value"] = s.aux_value;
    steps.push_back(js);
  }
  j["step_events"] = steps;
  j["true_switches"] = log.true_switches;
  if (summary.isps) j["isps"] = isps_to_json(*summary.isps);
  if (summary.bounds) j["bound_report"] = bounds_to_json(*summary.bounds);
  if (summary.lemma5) j["lemma5"] = lemma5_to_json(*summary.lemma5);
  return j.dump(2);
}

std::vector<std::string> emit_outputs(const TrajectoryLog& log, const RunSummary& summary,
                                      const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());

  std::vector<std::string> written;
  auto write_file = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    written.push_back(path);
  };

  write_file("trajectory.csv", trajectory_csv(log));
  write_file("summary.json", summary_json(log, summary, cfg));

  std::vector<double> norms, aux, sigmas;
  for (const auto& s : log.steps) {
    norms.push_back(s.x.norm());
    aux.push_back(s.aux_value);
    sigmas.push_back(s.w_sigma_min);
  }

  auto phase_bands = [&](SvgPlot& plot) {
    // Gray: holding (decay at the configured rate); orange: dormant; blue: excitation.
    auto color = [](Phase p) -> const char* {
      switch (p) {
        case Phase::Hold: return "#c8c8c8";
        case Phase::Dormant: return "#f5c77e";
        case Phase::Excite: return "#9ecbf0";
        case Phase::Solve: return nullptr;
      }
      return nullptr;
    };
    std::size_t start = 0;
    for (std::size_t i = 1; i <= log.steps.size(); ++i) {
      if (i == log.steps.size() || log.steps[i].phase != log.steps[start].phase) {
        const char* c = color(log.steps[start].phase);
        if (c != nullptr) plot.add_band(static_cast<double>(start), static_cast<double>(i), c);
        start = i;
      }
    }
  };

  {
    SvgPlot plot(cfg.name + ": state norm", "||x(k)||", /*log_y=*/false);
    phase_bands(plot);
    plot.add_series("||x||", norms, "#1f4e9c");
    plot.write((fs::path(out_dir) / "state_norm.svg").string());
    written.push_back((fs::path(out_dir) / "state_norm.svg").string());
  }
  {
    SvgPlot plot(cfg.name + ": auxiliary function", "V(x(k))", /*log_y=*/true);
    phase_bands(plot);
    plot.add_series("V(x)", aux, "#1f4e9c");
    plot.set_threshold(log.sup_cfg.delta_v, "delta_V");
    plot.write((fs::path(out_dir) / "aux_value.svg").string());
    written.push_back((fs::path(out_dir) / "aux_value.svg").string());
  }
  {
    SvgPlot plot(cfg.name + ": window rank margin", "sigma_min(W)", /*log_y=*/true);
    phase_bands(plot);
    plot.add_series("sigma_min", sigmas, "#2e7d32");
    plot.write((fs::path(out_dir) / "w_sigma_min.svg").string());
    written.push_back((fs::path(out_dir) / "w_sigma_min.svg").string());
  }
  return written;
}

}  // namespace ddsc
