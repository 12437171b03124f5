// phasewalk: run phase-space walk experiments from the command line.
//
//   phasewalk ideal     [options]        ideal coined walk
//   phasewalk cqed      [options]        driven cavity-qubit walk
//   phasewalk classical [options]        wrapped binomial random walk
//   phasewalk sweep     [options]        cqed walk over a parameter list
//   phasewalk validate-dispersive [options]
//   phasewalk fit SIGMA_CSV --fit-window a..b
//
// Exit codes: 0 ok, 1 I/O, 2 config, 3 numerical or truncation.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phasewalk/errors.hpp"
#include "phasewalk/experiment.hpp"

namespace pw = phasewalk;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<int> steps;
  std::optional<double> epsilon;
  std::optional<double> delta_theta;
  std::optional<int> fock_dim;
  std::optional<int> grid;
  std::optional<double> g;
  std::optional<double> omega_d;
  std::string fit_window;
  std::string accounting;
  bool allow_nondispersive = false;
  bool compensate = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output directory");
  app->add_option("--steps", o.steps, "number of walk steps")->check(CLI::NonNegativeNumber);
  app->add_option("--delta-theta", o.delta_theta, "step size, rad");
  app->add_option("--fock-dim", o.fock_dim, "walker truncation dimension");
  app->add_option("--grid", o.grid, "phase grid size (defaults to the Fock dimension)");
  app->add_option("--fit-window", o.fit_window, "fit steps a..b or a..b/stride");
}

void add_cqed(CLI::App* app, Overrides& o) {
  app->add_option("--epsilon", o.epsilon, "drive amplitude, GHz");
  app->add_option("--g", o.g, "cavity-qubit coupling, GHz");
  app->add_option("--omega-d", o.omega_d, "drive frequency, GHz");
  app->add_option("--phase-accounting", o.accounting, "free_segment_only or whole_step_mod_2pi")
      ->check(CLI::IsMember({"free_segment_only", "whole_step_mod_2pi"}));
  app->add_flag("--allow-nondispersive", o.allow_nondispersive, "run outside the dispersive regime");
  app->add_flag("--compensate", o.compensate, "retune the drive each step from the predicted photon number");
}

pw::ExperimentConfig resolve(const Overrides& o, std::optional<pw::Engine> engine) {
  pw::ExperimentConfig c = o.config.empty() ? pw::parse_config("{}") : pw::load_config(o.config);
  if (engine) c.engine = *engine;
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.steps) c.steps = *o.steps;
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.delta_theta) c.delta_theta = *o.delta_theta;
  if (o.fock_dim) c.fock_dim = *o.fock_dim;
  if (o.grid) c.grid = *o.grid;
  if (o.g) c.g = *o.g;
  if (o.omega_d) c.omega_d = *o.omega_d;
  if (!o.fit_window.empty()) c.fit_window = pw::parse_fit_window(o.fit_window);
  if (o.accounting == "free_segment_only") c.accounting = pw::PhaseAccounting::free_segment_only;
  if (o.accounting == "whole_step_mod_2pi") c.accounting = pw::PhaseAccounting::whole_step_mod_2pi;
  if (o.allow_nondispersive) c.allow_nondispersive = true;
  if (o.compensate) c.compensate = true;
  return c;
}

void print_fit(const std::optional<pw::FitResult>& fit, const std::string& label) {
  std::cout << label;
  if (fit) {
    std::cout << "zeta=" << pw::format_number(fit->zeta) << " xi=" << pw::format_number(fit->xi)
              << " points=" << fit->points << '\n';
  } else {
    std::cout << "fit unavailable\n";
  }
}

int run(const pw::ExperimentConfig& config) {
  config.validate();
  const pw::RunOutcome outcome = pw::run_experiment(config);
  if (config.sweep) {
    for (std::size_t i = 0; i < outcome.fits.size(); ++i) {
      print_fit(outcome.fits[i], config.sweep->parameter + "=" + pw::format_number(config.sweep->values[i]) + " ");
    }
  } else {
    print_fit(outcome.fits.front(), "");
  }
  std::cout << "wrote " << outcome.files.size() << " files to " << config.output_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined quantum walks in optical phase space"};
  app.require_subcommand(1);

  Overrides o;
  auto* ideal = app.add_subcommand("ideal", "ideal coined walk");
  auto* cqed = app.add_subcommand("cqed", "cavity-qubit walk under the effective Hamiltonian");
  auto* classical = app.add_subcommand("classical", "wrapped binomial random walk");
  auto* sweep = app.add_subcommand("sweep", "cqed walk for each value of a parameter");
  auto* dispersive = app.add_subcommand("validate-dispersive", "check g/|Omega - omega_c| and one-step fidelity");
  auto* fit = app.add_subcommand("fit", "re-fit an existing sigma.csv");

  for (auto* sub : {ideal, cqed, classical, sweep, dispersive}) add_common(sub, o);
  for (auto* sub : {cqed, sweep, dispersive}) add_cqed(sub, o);

  std::string sweep_parameter;
  std::vector<double> sweep_values;
  sweep->add_option("--parameter", sweep_parameter, "epsilon, delta_theta, g, omega_d or coin_angle");
  sweep->add_option("--values", sweep_values, "values to sweep")->delimiter(',');

  std::string sigma_csv;
  std::string fit_window = "2..10";
  fit->add_option("sigma_csv", sigma_csv, "sigma table")->required();
  fit->add_option("--fit-window", fit_window, "fit steps a..b or a..b/stride");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (ideal->parsed()) return run(resolve(o, pw::Engine::ideal));
    if (cqed->parsed()) return run(resolve(o, pw::Engine::cqed));
    if (classical->parsed()) return run(resolve(o, pw::Engine::classical));
    if (sweep->parsed()) {
      pw::ExperimentConfig c = resolve(o, std::nullopt);
      if (c.engine == pw::Engine::ideal && o.config.empty()) c.engine = pw::Engine::cqed;
      if (!c.sweep) c.sweep = pw::SweepSpec{"epsilon", pw::default_epsilon_sweep()};
      if (!sweep_parameter.empty()) c.sweep->parameter = sweep_parameter;
      if (!sweep_values.empty()) c.sweep->values = sweep_values;
      return run(c);
    }
    if (dispersive->parsed()) {
      const pw::DispersiveReport report = pw::validate_dispersive(resolve(o, pw::Engine::cqed));
      std::cout << report.text();
      return 0;
    }
    if (fit->parsed()) {
      const pw::FitResult r = pw::refit_sigma_table(sigma_csv, pw::parse_fit_window(fit_window));
      const nlohmann::json j = {{"zeta", r.zeta},
                                {"xi", r.xi},
                                {"residual_rms", r.residual_rms},
                                {"points", r.points},
                                {"window", {{"first", r.window.first}, {"last", r.window.last}, {"stride", r.window.stride}}}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const pw::TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const pw::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
