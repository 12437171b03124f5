#pragma once

// Configuration-driven experiment runner behind the `phasewalk` CLI.
//
// A config is a JSON object with the sections "engine", "walk", "cqed",
// "sweep", "analysis" and "output" (see README.md for every field). Unknown
// keys are rejected. A run writes
//   distributions.csv  theta,step_0,...,step_N   (one row per grid point)
//   sigma.csv          step,sigma,circular_sigma,reference_phase,mean_photon_number
//   fit.json           power-law fit over the configured window
//   manifest.json      the resolved config plus derived quantities; it loads
//                      back as a config and reproduces the run
// and, for a sweep, one point_NNN/ directory per value plus sweep_summary.csv.

#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phasewalk/analysis.hpp"
#include "phasewalk/cqed_walk.hpp"
#include "phasewalk/ideal_walk.hpp"

namespace phasewalk {

enum class Engine { ideal, cqed, classical };

struct SweepSpec {
  std::string parameter;  // epsilon, delta_theta, g, omega_d, coin_angle
  std::vector<double> values;
};

struct ExperimentConfig {
  Engine engine = Engine::ideal;

  // walk
  double delta_theta = 0.3;
  int steps = 25;
  int fock_dim = 64;
  Complex alpha{3.0, 0.0};
  CoinState coin = CoinState::balanced();

  // cqed
  double omega_c = 0.5;
  double omega_q = 0.7;
  double g = 0.01;
  std::optional<double> omega_d;  // defaults to omega_q
  double epsilon = 0.01;
  bool allow_nondispersive = false;
  double coin_angle = std::numbers::pi / 4.0;
  PhaseAccounting accounting = PhaseAccounting::free_segment_only;
  bool compensate = false;  // experimental drive retuning per step

  std::optional<SweepSpec> sweep;

  // analysis
  std::optional<int> grid;  // defaults to fock_dim
  FitWindow fit_window{2, 10, 2};

  std::filesystem::path output_dir = "phasewalk-out";

  int resolved_grid() const { return grid.value_or(fock_dim); }
  CqedParams cqed_params() const;
  IdealWalkConfig ideal_config() const;
  StateVector initial_state() const;

  // Cross-field checks for the selected engine. Throws ConfigError.
  void validate() const;
};

// Default sweep over the drive amplitude, GHz.
std::vector<double> default_epsilon_sweep();

ExperimentConfig parse_config(std::string_view json_text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical JSON for the config (what the manifest stores, minus "derived").
std::string config_to_json(const ExperimentConfig& config);

// Applies one sweep value; throws ConfigError for an unknown parameter.
ExperimentConfig with_parameter(ExperimentConfig config, const std::string& parameter, double value);

struct Derived {
  double truncation_leakage = 0.0;
  // cqed only
  std::optional<DispersiveRates> rates;
  std::optional<PulseSchedule> schedule;  // first step's schedule
  double frame_rotation_per_step = 0.0;
  std::vector<double> t_pulse_per_step;   // compensated runs
  std::vector<double> omega_d_per_step;   // compensated runs
};

// Everything a single (non-sweep) run produces, in memory.
struct WalkSeries {
  std::vector<PhaseDistribution> distributions;  // steps 0..N, in the reference frame
  std::vector<double> sigma;                     // about the reference phase
  std::vector<double> circular_sigma;            // about the circular mean
  std::vector<double> reference_phase;           // wrapped to (-pi, pi]
  std::vector<double> mean_photon_number;        // NaN for the classical engine
  std::optional<FitResult> fit;
  std::string fit_error;  // why `fit` is empty
  Derived derived;
};

// Runs the configured engine once, ignoring any sweep.
WalkSeries simulate(const ExperimentConfig& config);

// One WalkSeries per sweep value, in sweep order. Points run concurrently.
std::vector<WalkSeries> simulate_sweep(const ExperimentConfig& config);

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  std::vector<std::optional<FitResult>> fits;  // one per point
};

// Writes all result files under config.output_dir.
RunOutcome run_experiment(const ExperimentConfig& config);

struct DispersiveReport {
  double ratio = 0.0;  // g / |Omega - omega_c|
  double threshold = kDispersiveRatioLimit;
  bool passes = false;
  bool regime_violated = false;  // ran anyway under the override flag
  std::optional<DispersiveFidelity> fidelity;

  std::string text() const;
};

DispersiveReport validate_dispersive(const ExperimentConfig& config);

// Re-fits the sigma column of an existing sigma.csv.
FitResult refit_sigma_table(const std::filesystem::path& sigma_csv, const FitWindow& window);

// "a..b" or "a..b/stride"; stride defaults to 2.
FitWindow parse_fit_window(std::string_view text);

// 17 significant digits.
std::string format_number(double value);

}  // namespace phasewalk
