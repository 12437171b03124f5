#include "phasewalk/experiment.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "phasewalk/errors.hpp"

namespace phasewalk {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Strict JSON reading

std::string join(std::string_view path, std::string_view key) {
  return path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
}

void require_object(const json& j, std::string_view path) {
  if (!j.is_object()) throw ConfigError(std::string(path.empty() ? "config" : path) + ": expected an object");
}

void reject_unknown(const json& j, std::string_view path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + join(path, key) + "'");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

Complex as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(path + ": expected a number or a [re, im] pair");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

const char* engine_name(Engine e) {
  switch (e) {
    case Engine::ideal: return "ideal";
    case Engine::cqed: return "cqed";
    case Engine::classical: return "classical";
  }
  return "ideal";
}

const char* accounting_name(PhaseAccounting a) {
  return a == PhaseAccounting::free_segment_only ? "free_segment_only" : "whole_step_mod_2pi";
}

template <class F>
void if_present(const json& obj, std::string_view path, const char* key, F&& read) {
  auto it = obj.find(key);
  if (it != obj.end()) read(*it, join(path, key));
}

void read_walk(const json& j, ExperimentConfig& c) {
  require_object(j, "walk");
  reject_unknown(j, "walk", {"delta_theta", "steps", "fock_dim", "alpha", "coin"});
  if_present(j, "walk", "delta_theta", [&](const json& v, const std::string& p) { c.delta_theta = as_number(v, p); });
  if_present(j, "walk", "steps", [&](const json& v, const std::string& p) { c.steps = as_int(v, p); });
  if_present(j, "walk", "fock_dim", [&](const json& v, const std::string& p) { c.fock_dim = as_int(v, p); });
  if_present(j, "walk", "alpha", [&](const json& v, const std::string& p) { c.alpha = as_complex(v, p); });
  if_present(j, "walk", "coin", [&](const json& v, const std::string& p) {
    require_object(v, p);
    reject_unknown(v, p, {"c0", "c1"});
    if (!v.contains("c0") || !v.contains("c1")) throw ConfigError(p + ": needs both c0 and c1");
    c.coin = {as_complex(v["c0"], p + ".c0"), as_complex(v["c1"], p + ".c1")};
  });
}

void read_cqed(const json& j, ExperimentConfig& c) {
  require_object(j, "cqed");
  reject_unknown(j, "cqed",
                 {"omega_c", "omega_q", "g", "omega_d", "epsilon", "allow_nondispersive", "coin_angle",
                  "phase_accounting", "compensate"});
  if_present(j, "cqed", "omega_c", [&](const json& v, const std::string& p) { c.omega_c = as_number(v, p); });
  if_present(j, "cqed", "omega_q", [&](const json& v, const std::string& p) { c.omega_q = as_number(v, p); });
  if_present(j, "cqed", "g", [&](const json& v, const std::string& p) { c.g = as_number(v, p); });
  if_present(j, "cqed", "omega_d", [&](const json& v, const std::string& p) {
    if (v.is_null()) {
      c.omega_d.reset();
    } else {
      c.omega_d = as_number(v, p);
    }
  });
  if_present(j, "cqed", "epsilon", [&](const json& v, const std::string& p) { c.epsilon = as_number(v, p); });
  if_present(j, "cqed", "allow_nondispersive",
             [&](const json& v, const std::string& p) { c.allow_nondispersive = as_bool(v, p); });
  if_present(j, "cqed", "coin_angle", [&](const json& v, const std::string& p) { c.coin_angle = as_number(v, p); });
  if_present(j, "cqed", "phase_accounting", [&](const json& v, const std::string& p) {
    if (v == "free_segment_only") {
      c.accounting = PhaseAccounting::free_segment_only;
    } else if (v == "whole_step_mod_2pi") {
      c.accounting = PhaseAccounting::whole_step_mod_2pi;
    } else {
      throw ConfigError(p + ": expected \"free_segment_only\" or \"whole_step_mod_2pi\"");
    }
  });
  if_present(j, "cqed", "compensate", [&](const json& v, const std::string& p) { c.compensate = as_bool(v, p); });
}

void read_sweep(const json& j, ExperimentConfig& c) {
  if (j.is_null()) {
    c.sweep.reset();
    return;
  }
  require_object(j, "sweep");
  reject_unknown(j, "sweep", {"parameter", "values"});
  SweepSpec s;
  s.parameter = "epsilon";
  s.values = default_epsilon_sweep();
  if_present(j, "sweep", "parameter", [&](const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p + ": expected a string");
    s.parameter = v.get<std::string>();
  });
  if_present(j, "sweep", "values", [&](const json& v, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p + ": expected an array of numbers");
    s.values.clear();
    for (std::size_t i = 0; i < v.size(); ++i) s.values.push_back(as_number(v[i], p + "[" + std::to_string(i) + "]"));
  });
  c.sweep = std::move(s);
}

void read_analysis(const json& j, ExperimentConfig& c) {
  require_object(j, "analysis");
  reject_unknown(j, "analysis", {"grid", "fit_window"});
  if_present(j, "analysis", "grid", [&](const json& v, const std::string& p) {
    if (v.is_null()) {
      c.grid.reset();
    } else {
      c.grid = as_int(v, p);
    }
  });
  if_present(j, "analysis", "fit_window", [&](const json& v, const std::string& p) {
    if (v.is_string()) {
      c.fit_window = parse_fit_window(v.get<std::string>());
      return;
    }
    require_object(v, p);
    reject_unknown(v, p, {"first", "last", "stride"});
    if_present(v, p, "first", [&](const json& x, const std::string& q) { c.fit_window.first = as_int(x, q); });
    if_present(v, p, "last", [&](const json& x, const std::string& q) { c.fit_window.last = as_int(x, q); });
    if_present(v, p, "stride", [&](const json& x, const std::string& q) { c.fit_window.stride = as_int(x, q); });
  });
}

void read_output(const json& j, ExperimentConfig& c) {
  require_object(j, "output");
  reject_unknown(j, "output", {"dir"});
  if_present(j, "output", "dir", [&](const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p + ": expected a string");
    c.output_dir = v.get<std::string>();
  });
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["engine"] = engine_name(c.engine);
  j["walk"] = {{"delta_theta", c.delta_theta},
               {"steps", c.steps},
               {"fock_dim", c.fock_dim},
               {"alpha", complex_json(c.alpha)},
               {"coin", {{"c0", complex_json(c.coin.c0)}, {"c1", complex_json(c.coin.c1)}}}};
  j["cqed"] = {{"omega_c", c.omega_c},
               {"omega_q", c.omega_q},
               {"g", c.g},
               {"omega_d", c.omega_d.value_or(c.omega_q)},
               {"epsilon", c.epsilon},
               {"allow_nondispersive", c.allow_nondispersive},
               {"coin_angle", c.coin_angle},
               {"phase_accounting", accounting_name(c.accounting)},
               {"compensate", c.compensate}};
  j["sweep"] = c.sweep ? json{{"parameter", c.sweep->parameter}, {"values", c.sweep->values}} : json(nullptr);
  j["analysis"] = {{"grid", c.resolved_grid()},
                   {"fit_window",
                    {{"first", c.fit_window.first}, {"last", c.fit_window.last}, {"stride", c.fit_window.stride}}}};
  j["output"] = {{"dir", c.output_dir.generic_string()}};
  return j;
}

// ---------------------------------------------------------------------------
// Output

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string distributions_csv(const WalkSeries& s) {
  std::ostringstream os;
  os << "theta";
  for (std::size_t k = 0; k < s.distributions.size(); ++k) os << ",step_" << k;
  os << '\n';
  const int grid = s.distributions.empty() ? 0 : s.distributions.front().size();
  for (int j = 0; j < grid; ++j) {
    os << format_number(kTwoPi * j / grid);
    for (const PhaseDistribution& d : s.distributions) os << ',' << format_number(d.probs[j]);
    os << '\n';
  }
  return os.str();
}

std::string sigma_csv(const WalkSeries& s) {
  std::ostringstream os;
  os << "step,sigma,circular_sigma,reference_phase,mean_photon_number\n";
  for (std::size_t k = 0; k < s.sigma.size(); ++k) {
    os << k << ',' << format_number(s.sigma[k]) << ',' << format_number(s.circular_sigma[k]) << ','
       << format_number(s.reference_phase[k]) << ',' << format_number(s.mean_photon_number[k]) << '\n';
  }
  return os.str();
}

json fit_json(const WalkSeries& s, const FitWindow& window) {
  json j;
  j["window"] = {{"first", window.first}, {"last", window.last}, {"stride", window.stride}};
  j["sigma_measure"] = "reference_frame";
  if (s.fit) {
    j["status"] = "ok";
    j["zeta"] = s.fit->zeta;
    j["xi"] = s.fit->xi;
    j["residual_rms"] = s.fit->residual_rms;
    j["points"] = s.fit->points;
  } else {
    j["status"] = "unavailable";
    j["message"] = s.fit_error;
  }
  return j;
}

json schedule_json(const PulseSchedule& s) {
  return {{"t_pulse", s.t_pulse},
          {"t_free", s.t_free},
          {"nominal_delta_theta", s.nominal_delta_theta},
          {"coin_angle", s.coin_angle},
          {"omega_d", s.omega_d},
          {"step_duration", s.step_duration()}};
}

json derived_json(const ExperimentConfig& c, const WalkSeries& s) {
  json d;
  d["grid_renormalized"] = c.resolved_grid() != c.fock_dim && c.engine != Engine::classical;
  d["reference_phase"] = s.reference_phase;
  if (c.engine != Engine::classical) {
    d["truncation_leakage"] = s.derived.truncation_leakage;
    d["mean_photon_number"] = s.mean_photon_number;
  }
  if (s.derived.rates) {
    const DispersiveRates& r = *s.derived.rates;
    d["delta"] = r.delta;
    d["delta1"] = r.delta1;
    d["delta2"] = r.delta2;
    d["chi"] = r.chi;
    d["omega2"] = r.omega2;
    d["g_over_delta"] = c.g / std::abs(r.delta);
    d["frame_rotation_per_step"] = s.derived.frame_rotation_per_step;
  }
  if (s.derived.schedule) d["schedule"] = schedule_json(*s.derived.schedule);
  if (!s.derived.t_pulse_per_step.empty()) {
    d["t_pulse_per_step"] = s.derived.t_pulse_per_step;
    d["omega_d_per_step"] = s.derived.omega_d_per_step;
  }
  return d;
}

std::vector<std::filesystem::path> write_point(const std::filesystem::path& dir, const ExperimentConfig& c,
                                               const WalkSeries& s) {
  std::filesystem::create_directories(dir);
  const std::array<std::filesystem::path, 4> paths{dir / "distributions.csv", dir / "sigma.csv", dir / "fit.json",
                                                   dir / "manifest.json"};
  write_text(paths[0], distributions_csv(s));
  write_text(paths[1], sigma_csv(s));
  write_text(paths[2], fit_json(s, c.fit_window).dump(2) + "\n");
  json manifest = config_json(c);
  manifest["derived"] = derived_json(c, s);
  write_text(paths[3], manifest.dump(2) + "\n");
  return {paths.begin(), paths.end()};
}

std::string point_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%03zu", i);
  return buf;
}

void fill_fit(WalkSeries& s, const FitWindow& window) {
  std::vector<SpreadSample> samples;
  for (std::size_t k = 0; k < s.sigma.size(); ++k) samples.push_back({static_cast<int>(k), s.sigma[k]});
  try {
    s.fit = fit_power_law(samples, window);
  } catch (const ConfigError& e) {
    s.fit_error = e.what();
  } catch (const std::domain_error& e) {
    s.fit_error = e.what();
  }
}

void add_quantum_step(WalkSeries& s, const StateVector& state, int grid, GridMode mode, double reference) {
  PhaseDistribution dist = phase_distribution(state, grid, mode, reference);
  s.sigma.push_back(centered_std(dist, reference));
  s.circular_sigma.push_back(circular_std(dist).sigma);
  s.reference_phase.push_back(reference);
  s.mean_photon_number.push_back(state.mean_photon_number());
  s.distributions.push_back(std::move(dist));
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::vector<double> default_epsilon_sweep() { return {0.01, 0.012, 0.015, 0.018}; }

CqedParams ExperimentConfig::cqed_params() const {
  CqedParams p;
  p.omega_c = omega_c;
  p.omega_q = omega_q;
  p.g = g;
  p.omega_d = omega_d.value_or(omega_q);
  p.epsilon = epsilon;
  p.fock_dim = fock_dim;
  p.allow_nondispersive = allow_nondispersive;
  return p;
}

IdealWalkConfig ExperimentConfig::ideal_config() const {
  IdealWalkConfig w;
  w.delta_theta = delta_theta;
  w.steps = steps;
  w.fock_dim = fock_dim;
  w.initial_walker = CoherentWalker{alpha};
  w.initial_coin = coin;
  return w;
}

StateVector ExperimentConfig::initial_state() const { return phasewalk::initial_state(ideal_config()); }

void ExperimentConfig::validate() const {
  ideal_config().validate();
  if (fock_dim < 2) throw ConfigError("walk.fock_dim must be >= 2");
  if (resolved_grid() < 1) throw ConfigError("analysis.grid must be >= 1");
  if (fit_window.stride < 1) throw ConfigError("analysis.fit_window.stride must be >= 1");
  if (fit_window.last < fit_window.first) throw ConfigError("analysis.fit_window: last < first");
  if (engine == Engine::cqed) {
    const CqedParams p = cqed_params();
    p.validate();
    const DispersiveRates r = dispersive_rates(p);
    if (!(epsilon > 0.0)) throw ConfigError("cqed.epsilon must be > 0 to flip the coin");
    if (!(r.chi > 0.0)) throw ConfigError("cqed: chi = g^2 / (omega_q - omega_c) must be > 0");
    if (!(coin_angle > 0.0)) throw ConfigError("cqed.coin_angle must be > 0");
  }
  if (sweep) {
    if (sweep->values.empty()) throw ConfigError("sweep.values must not be empty");
    for (double v : sweep->values) {
      ExperimentConfig point = with_parameter(*this, sweep->parameter, v);
      point.sweep.reset();
      point.validate();
    }
  }
}

ExperimentConfig with_parameter(ExperimentConfig config, const std::string& parameter, double value) {
  if (parameter == "epsilon") {
    config.epsilon = value;
  } else if (parameter == "delta_theta") {
    config.delta_theta = value;
  } else if (parameter == "g") {
    config.g = value;
  } else if (parameter == "omega_d") {
    config.omega_d = value;
  } else if (parameter == "coin_angle") {
    config.coin_angle = value;
  } else {
    throw ConfigError("sweep.parameter: unknown parameter '" + parameter +
                      "' (expected epsilon, delta_theta, g, omega_d or coin_angle)");
  }
  return config;
}

ExperimentConfig parse_config(std::string_view json_text, std::string_view source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ": parse error at byte " << e.byte << ": " << e.what();
    throw ConfigError(os.str());
  }
  require_object(j, "");
  reject_unknown(j, "", {"engine", "walk", "cqed", "sweep", "analysis", "output", "derived"});

  ExperimentConfig c;
  if_present(j, "", "engine", [&](const json& v, const std::string& p) {
    if (v == "ideal") {
      c.engine = Engine::ideal;
    } else if (v == "cqed") {
      c.engine = Engine::cqed;
    } else if (v == "classical") {
      c.engine = Engine::classical;
    } else {
      throw ConfigError(p + ": expected \"ideal\", \"cqed\" or \"classical\"");
    }
  });
  if_present(j, "", "walk", [&](const json& v, const std::string&) { read_walk(v, c); });
  if_present(j, "", "cqed", [&](const json& v, const std::string&) { read_cqed(v, c); });
  if_present(j, "", "sweep", [&](const json& v, const std::string&) { read_sweep(v, c); });
  if_present(j, "", "analysis", [&](const json& v, const std::string&) { read_analysis(v, c); });
  if_present(j, "", "output", [&](const json& v, const std::string&) { read_output(v, c); });
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Simulation

WalkSeries simulate(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.sweep.reset();
  c.validate();

  WalkSeries s;
  const int grid = c.resolved_grid();
  const GridMode mode = grid == c.fock_dim ? GridMode::complete : GridMode::renormalized;
  const double start_phase = std::arg(c.alpha);

  switch (c.engine) {
    case Engine::ideal: {
      s.derived.truncation_leakage = coherent_state(c.alpha, c.fock_dim).leakage;
      for (const StateVector& state : run_ideal(c.ideal_config())) {
        add_quantum_step(s, state, grid, mode, start_phase);
      }
      break;
    }
    case Engine::cqed: {
      s.derived.truncation_leakage = coherent_state(c.alpha, c.fock_dim).leakage;
      const CqedParams p = c.cqed_params();
      s.derived.rates = dispersive_rates(p);
      const ScheduleOptions options{c.coin_angle, c.accounting};
      const StateVector initial = c.initial_state();
      if (c.compensate) {
        CompensatedRun run = run_cqed_compensated(p, c.delta_theta, c.steps, initial, options);
        double reference = start_phase;
        for (std::size_t k = 0; k < run.states.size(); ++k) {
          add_quantum_step(s, run.states[k], grid, mode, wrap_angle(reference));
          if (k < run.schedules.size()) {
            reference += frame_rotation_per_step(p, run.schedules[k]);
            s.derived.t_pulse_per_step.push_back(run.schedules[k].t_pulse);
            s.derived.omega_d_per_step.push_back(run.schedules[k].omega_d);
          }
        }
        if (!run.schedules.empty()) s.derived.schedule = run.schedules.front();
      } else {
        const PulseSchedule schedule = make_schedule(p, c.delta_theta, options);
        s.derived.schedule = schedule;
        const double rotation = frame_rotation_per_step(p, schedule);
        s.derived.frame_rotation_per_step = rotation;
        const std::vector<StateVector> states = run_cqed(p, schedule, c.steps, initial);
        for (std::size_t k = 0; k < states.size(); ++k) {
          add_quantum_step(s, states[k], grid, mode, wrap_angle(start_phase + double(k) * rotation));
        }
      }
      break;
    }
    case Engine::classical: {
      for (int k = 0; k <= c.steps; ++k) {
        PhaseDistribution dist = classical_rw_distribution(k, c.delta_theta, grid);
        s.sigma.push_back(centered_std(dist, 0.0));
        s.circular_sigma.push_back(circular_std(dist).sigma);
        s.reference_phase.push_back(0.0);
        s.mean_photon_number.push_back(std::numeric_limits<double>::quiet_NaN());
        s.distributions.push_back(std::move(dist));
      }
      break;
    }
  }
  fill_fit(s, c.fit_window);
  return s;
}

std::vector<WalkSeries> simulate_sweep(const ExperimentConfig& config) {
  if (!config.sweep) return {simulate(config)};
  std::vector<std::future<WalkSeries>> pending;
  pending.reserve(config.sweep->values.size());
  for (double value : config.sweep->values) {
    ExperimentConfig point = with_parameter(config, config.sweep->parameter, value);
    point.sweep.reset();
    pending.push_back(std::async(std::launch::async, [point] { return simulate(point); }));
  }
  std::vector<WalkSeries> out;
  out.reserve(pending.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

RunOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunOutcome outcome;
  const std::filesystem::path root = config.output_dir;
  std::filesystem::create_directories(root);

  if (!config.sweep) {
    const WalkSeries s = simulate(config);
    outcome.files = write_point(root, config, s);
    outcome.fits.push_back(s.fit);
    return outcome;
  }

  const std::vector<WalkSeries> series = simulate_sweep(config);
  std::ostringstream summary;
  summary << "index,parameter,value,zeta,xi,residual_rms,points\n";
  json points = json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double value = config.sweep->values[i];
    ExperimentConfig point = with_parameter(config, config.sweep->parameter, value);
    point.sweep.reset();
    point.output_dir = root / point_name(i);
    for (auto& f : write_point(point.output_dir, point, series[i])) outcome.files.push_back(std::move(f));
    outcome.fits.push_back(series[i].fit);

    const auto& fit = series[i].fit;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    summary << i << ',' << config.sweep->parameter << ',' << format_number(value) << ','
            << format_number(fit ? fit->zeta : nan) << ',' << format_number(fit ? fit->xi : nan) << ','
            << format_number(fit ? fit->residual_rms : nan) << ',' << (fit ? fit->points : 0) << '\n';
    points.push_back({{"value", value}, {"dir", point_name(i)}});
  }
  const std::filesystem::path summary_path = root / "sweep_summary.csv";
  write_text(summary_path, summary.str());
  outcome.files.push_back(summary_path);

  json manifest = config_json(config);
  manifest["derived"] = {{"points", points}};
  const std::filesystem::path manifest_path = root / "manifest.json";
  write_text(manifest_path, manifest.dump(2) + "\n");
  outcome.files.push_back(manifest_path);
  return outcome;
}

// ---------------------------------------------------------------------------
// Dispersive validation

std::string DispersiveReport::text() const {
  std::ostringstream os;
  os << "g/|Omega - omega_c| = " << format_number(ratio) << " (threshold " << format_number(threshold) << "): ";
  if (passes) {
    os << "pass\n";
  } else if (regime_violated) {
    os << "fail (regime violated, run under override)\n";
  } else {
    os << "fail\n";
  }
  if (fidelity) {
    os << "one-step dispersive fidelity = " << format_number(fidelity->fidelity) << '\n'
       << "  aligned global phase = " << format_number(fidelity->global_phase) << " rad\n"
       << "  aligned field rotation = " << format_number(fidelity->rotation_angle) << " rad\n";
  }
  return os.str();
}

DispersiveReport validate_dispersive(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.engine = Engine::cqed;
  c.sweep.reset();
  const CqedParams p = c.cqed_params();
  p.validate(false);
  const double detuning = std::abs(p.omega_q - p.omega_c);
  if (detuning == 0.0) throw ConfigError("Omega == omega_c: detuning is zero");

  DispersiveReport report;
  report.ratio = p.g / detuning;
  report.passes = report.ratio <= report.threshold;
  if (!report.passes && !p.allow_nondispersive) return report;
  report.regime_violated = !report.passes;

  const PulseSchedule schedule = make_schedule(p, c.delta_theta, {c.coin_angle, c.accounting});
  report.fidelity = dispersive_fidelity(p, schedule, c.initial_state());
  return report;
}

// ---------------------------------------------------------------------------
// Refit and small helpers

FitResult refit_sigma_table(const std::filesystem::path& sigma_csv_path, const FitWindow& window) {
  std::ifstream in(sigma_csv_path);
  if (!in) throw ConfigError("cannot open sigma table " + sigma_csv_path.string());

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(sigma_csv_path.string() + ": empty file");
  const std::vector<std::string> header = split(line);
  int step_col = -1;
  int sigma_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "step") step_col = static_cast<int>(i);
    if (header[i] == "sigma") sigma_col = static_cast<int>(i);
  }
  if (step_col < 0 || sigma_col < 0) throw ConfigError(sigma_csv_path.string() + ": header needs step and sigma");

  std::vector<SpreadSample> samples;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (static_cast<int>(cells.size()) <= std::max(step_col, sigma_col)) {
      throw ConfigError(sigma_csv_path.string() + ": row " + std::to_string(row) + " is too short");
    }
    SpreadSample s{};
    const std::string& a = cells[step_col];
    const std::string& b = cells[sigma_col];
    if (std::from_chars(a.data(), a.data() + a.size(), s.step).ec != std::errc{} ||
        std::from_chars(b.data(), b.data() + b.size(), s.sigma).ec != std::errc{}) {
      throw ConfigError(sigma_csv_path.string() + ": row " + std::to_string(row) + " is not numeric");
    }
    samples.push_back(s);
  }
  return fit_power_law(samples, window);
}

FitWindow parse_fit_window(std::string_view text) {
  const auto bad = [&] {
    return ConfigError("fit window '" + std::string(text) + "': expected a..b or a..b/stride");
  };
  const std::size_t dots = text.find("..");
  if (dots == std::string_view::npos) throw bad();
  FitWindow w;
  const std::string_view first = text.substr(0, dots);
  std::string_view rest = text.substr(dots + 2);
  std::string_view stride;
  if (const std::size_t slash = rest.find('/'); slash != std::string_view::npos) {
    stride = rest.substr(slash + 1);
    rest = rest.substr(0, slash);
  }
  auto parse_int = [&](std::string_view s, int& out) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw bad();
  };
  parse_int(first, w.first);
  parse_int(rest, w.last);
  if (!stride.empty()) parse_int(stride, w.stride);
  if (w.stride < 1 || w.last < w.first) throw bad();
  return w;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), r.ptr);
}

}  // namespace phasewalk
