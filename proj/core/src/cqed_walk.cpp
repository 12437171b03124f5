#include "phasewalk/cqed_walk.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "phasewalk/errors.hpp"

namespace phasewalk {

namespace {

struct Blocks {
  CMatrix n;        // n (x) I
  CMatrix field_x;  // (a + a^dagger) (x) I
  CMatrix sz;       // I (x) sigma_z
  CMatrix sx;       // I (x) sigma_x
  CMatrix exchange; // a^dagger (x) sigma_- + a (x) sigma_+
};

Blocks make_blocks(int fock_dim) {
  const LadderPauli ops = ladder_and_pauli(fock_dim);
  const CMatrix id_w = CMatrix::Identity(fock_dim, fock_dim);
  const CMatrix id_c = CMatrix::Identity(2, 2);
  return {tensor(ops.n_op, id_c), tensor(ops.a + ops.a_dagger, id_c), tensor(id_w, ops.sigma_z),
          tensor(id_w, ops.sigma_x),
          tensor(ops.a_dagger, ops.sigma_minus) + tensor(ops.a, ops.sigma_plus)};
}

CqedParams with_drive(CqedParams params, double omega_d, double epsilon) {
  params.omega_d = omega_d;
  params.epsilon = epsilon;
  return params;
}

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

// Unitary for one step, built from cached segment propagators.
class StepBuilder {
 public:
  StepBuilder(const CqedParams& params, EffectiveTerms terms) : params_(params), terms_(terms) {}

  UnitaryOperator step(const PulseSchedule& schedule) {
    UnitaryOperator u = UnitaryOperator::identity(2 * params_.fock_dim);
    for (const PulseSegment& seg : schedule.segments) u = segment(seg, schedule.omega_d) * u;
    return u;
  }

 private:
  using Key = std::tuple<int, std::uint64_t, std::uint64_t>;

  const UnitaryOperator& segment(const PulseSegment& seg, double omega_d) {
    const Key key{static_cast<int>(seg.kind), bits(seg.duration), bits(omega_d)};
    auto it = unitaries_.find(key);
    if (it != unitaries_.end()) return it->second;
    return unitaries_.emplace(key, generator(seg.kind, omega_d).at(seg.duration)).first->second;
  }

  const SpectralPropagator& generator(SegmentKind kind, double omega_d) {
    const std::pair<int, std::uint64_t> key{static_cast<int>(kind), bits(omega_d)};
    auto it = generators_.find(key);
    if (it != generators_.end()) return it->second;
    const double eps = kind == SegmentKind::drive_on ? params_.epsilon : 0.0;
    const HermitianOperator h = build_effective(with_drive(params_, omega_d, eps), terms_);
    return generators_.emplace(key, SpectralPropagator(h)).first->second;
  }

  CqedParams params_;
  EffectiveTerms terms_;
  std::map<std::pair<int, std::uint64_t>, SpectralPropagator> generators_;
  std::map<Key, UnitaryOperator> unitaries_;
};

StateVector evolve_segments(const PulseSchedule& schedule, const StateVector& initial,
                            const SpectralPropagator& on, const SpectralPropagator& off) {
  StateVector state = initial;
  for (const PulseSegment& seg : schedule.segments) {
    const SpectralPropagator& gen = seg.kind == SegmentKind::drive_on ? on : off;
    state = gen.at(seg.duration).apply(state);
  }
  return state;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameters

void QubitCircuitParams::validate() const {
  if (!(charging_energy > 0.0)) throw ConfigError("charging energy E_c must be > 0");
  if (!(gate_charge >= 0.0 && gate_charge <= 1.0)) throw ConfigError("gate charge N_g must lie in [0, 1]");
  if (!(tunneling >= 0.0)) throw ConfigError("tunneling rate must be >= 0");
}

double qubit_splitting(const QubitCircuitParams& params) {
  params.validate();
  const double bias = params.charging_energy * (1.0 - 2.0 * params.gate_charge);
  return std::sqrt(bias * bias + 4.0 * params.tunneling * params.tunneling);
}

void CqedParams::validate(bool require_dispersive) const {
  if (!(omega_c > 0.0)) throw ConfigError("omega_c must be > 0");
  if (!(omega_q > 0.0)) throw ConfigError("omega_q must be > 0");
  if (!(omega_d >= 0.0)) throw ConfigError("omega_d must be >= 0");
  if (!(g >= 0.0)) throw ConfigError("g must be >= 0");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (fock_dim < 2) throw ConfigError("fock_dim must be >= 2");
  if (require_dispersive && !allow_nondispersive) {
    const double detuning = std::abs(omega_q - omega_c);
    if (!(detuning >= g / kDispersiveRatioLimit)) {
      std::ostringstream os;
      os << "not dispersive: g/|Omega - omega_c| = " << g / detuning << " exceeds " << kDispersiveRatioLimit
         << " (set allow_nondispersive to override)";
      throw ConfigError(os.str());
    }
  }
}

DispersiveRates dispersive_rates(const CqedParams& params) {
  DispersiveRates r{};
  r.delta = params.omega_q - params.omega_c;
  r.delta1 = params.omega_d - params.omega_q;
  r.delta2 = params.omega_d - params.omega_c;
  if (r.delta == 0.0) throw ConfigError("Omega == omega_c: detuning is zero, chi is undefined");
  if (r.delta2 == 0.0) throw ConfigError("omega_d == omega_c: Omega2 = 2 g epsilon / delta2 is undefined");
  r.chi = params.g * params.g / r.delta;
  r.omega2 = 2.0 * params.g * params.epsilon / r.delta2;
  return r;
}

// ---------------------------------------------------------------------------
// Hamiltonians

HermitianOperator build_jc(const CqedParams& params) {
  params.validate(false);
  const Blocks b = make_blocks(params.fock_dim);
  CMatrix h = angular(params.omega_c) * b.n + (0.5 * angular(params.omega_q)) * b.sz +
              angular(params.g) * b.exchange;
  return HermitianOperator(std::move(h), "H_JC");
}

HermitianOperator build_rotating_full(const CqedParams& params) {
  params.validate(false);
  const Blocks b = make_blocks(params.fock_dim);
  CMatrix h = angular(params.omega_c - params.omega_d) * b.n +
              (0.5 * angular(params.omega_q - params.omega_d)) * b.sz + angular(params.g) * b.exchange +
              angular(params.epsilon) * b.field_x;
  return HermitianOperator(std::move(h), "H_full (rotating frame)");
}

HermitianOperator build_effective(const CqedParams& params, EffectiveTerms terms) {
  params.validate();
  const DispersiveRates r = dispersive_rates(params);
  const Blocks b = make_blocks(params.fock_dim);
  CMatrix h = angular(r.chi) * (b.n * b.sz) - (0.5 * angular(r.delta1)) * b.sz - angular(r.delta2) * b.n +
              (0.5 * angular(r.omega2)) * b.sx;
  if (terms.displacement) h += angular(params.epsilon) * b.field_x;
  return HermitianOperator(std::move(h), "H_eff");
}

// ---------------------------------------------------------------------------
// Schedules

double PulseSchedule::step_duration() const {
  double t = 0.0;
  for (const PulseSegment& seg : segments) t += seg.duration;
  return t;
}

PulseSchedule make_schedule(const CqedParams& params, double delta_theta, ScheduleOptions options) {
  params.validate();
  const DispersiveRates r = dispersive_rates(params);
  if (!(params.epsilon > 0.0)) throw ConfigError("a pulse schedule needs epsilon > 0");
  if (!(r.chi > 0.0)) throw ConfigError("a pulse schedule needs chi > 0 (g > 0 and Omega > omega_c)");
  if (!(delta_theta > 0.0)) throw ConfigError("delta_theta must be > 0");
  if (!(options.coin_angle > 0.0)) throw ConfigError("coin_angle must be > 0");

  const double chi = angular(r.chi);
  PulseSchedule s;
  s.coin_angle = options.coin_angle;
  s.omega_d = params.omega_d;
  s.accounting = options.accounting;
  s.t_pulse = 2.0 * options.coin_angle / std::abs(angular(r.omega2));

  switch (options.accounting) {
    case PhaseAccounting::free_segment_only:
      s.t_free = delta_theta / chi;
      s.nominal_delta_theta = chi * s.t_free;
      break;
    case PhaseAccounting::whole_step_mod_2pi: {
      double remaining = std::fmod(delta_theta - chi * s.t_pulse, kTwoPi);
      if (remaining <= 0.0) remaining += kTwoPi;
      s.t_free = remaining / chi;
      s.nominal_delta_theta = delta_theta;
      break;
    }
  }
  s.segments = {{SegmentKind::drive_on, s.t_pulse}, {SegmentKind::drive_off, s.t_free}};
  return s;
}

PulseSchedule compensated_schedule(const CqedParams& params, double delta_theta, double predicted_n,
                                   ScheduleOptions options) {
  if (!(predicted_n >= 0.0)) throw ConfigError("predicted photon number must be >= 0");
  const DispersiveRates r = dispersive_rates(params);
  CqedParams retuned = params;
  retuned.omega_d = params.omega_d + 2.0 * r.chi * predicted_n;
  return make_schedule(retuned, delta_theta, options);
}

double frame_rotation_per_step(const CqedParams& params, const PulseSchedule& schedule) {
  return angular(schedule.omega_d - params.omega_c) * schedule.step_duration();
}

// ---------------------------------------------------------------------------
// Trajectories

std::vector<StateVector> run_cqed(const CqedParams& params, const PulseSchedule& schedule, int steps,
                                  const StateVector& initial, CqedRunOptions options) {
  params.validate();
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (initial.fock_dim() != params.fock_dim || initial.coin_dim() != 2) {
    throw DimensionError("initial state does not live on the fock_dim x 2 space of the parameters");
  }
  std::vector<StateVector> states;
  states.reserve(steps + 1);
  states.push_back(initial);
  if (steps == 0) return states;

  StepBuilder builder(params, options.terms);
  const UnitaryOperator step = builder.step(schedule);
  for (int j = 0; j < steps; ++j) states.push_back(step.apply(states.back()));
  return states;
}

CompensatedRun run_cqed_compensated(const CqedParams& params, double delta_theta, int steps,
                                    const StateVector& initial, ScheduleOptions options) {
  params.validate();
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (initial.fock_dim() != params.fock_dim || initial.coin_dim() != 2) {
    throw DimensionError("initial state does not live on the fock_dim x 2 space of the parameters");
  }
  CompensatedRun run;
  run.states.reserve(steps + 1);
  run.states.push_back(initial);
  StepBuilder builder(params, {});
  for (int j = 0; j < steps; ++j) {
    const StateVector& current = run.states.back();
    PulseSchedule s = compensated_schedule(params, delta_theta, current.mean_photon_number(), options);
    run.states.push_back(builder.step(s).apply(current));
    run.schedules.push_back(std::move(s));
  }
  return run;
}

// ---------------------------------------------------------------------------
// Dispersive validation

DispersiveFidelity dispersive_fidelity(const CqedParams& params, const PulseSchedule& schedule,
                                       const StateVector& initial) {
  params.validate();
  if (initial.fock_dim() != params.fock_dim || initial.coin_dim() != 2) {
    throw DimensionError("initial state does not live on the fock_dim x 2 space of the parameters");
  }
  const CqedParams on = with_drive(params, schedule.omega_d, params.epsilon);
  const CqedParams off = with_drive(params, schedule.omega_d, 0.0);

  const StateVector full = evolve_segments(schedule, initial, SpectralPropagator(build_rotating_full(on)),
                                           SpectralPropagator(build_rotating_full(off)));
  const StateVector eff = evolve_segments(schedule, initial, SpectralPropagator(build_effective(on)),
                                          SpectralPropagator(build_effective(off)));

  // <full| exp(i phi n) |eff>
  const int dim = full.dim();
  auto overlap = [&](double phi) {
    Complex acc{0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
      const int n = i / 2;
      acc += std::conj(full.amplitudes()[i]) * std::polar(1.0, phi * n) * eff.amplitudes()[i];
    }
    return acc;
  };
  auto loss = [&](double phi) { return -std::norm(overlap(phi)); };

  // |overlap|^2 is a trigonometric polynomial of degree <= fock_dim - 1,
  // so a grid several times finer than pi / fock_dim brackets its maximum.
  const int grid = 16 * params.fock_dim;
  const double h = kTwoPi / grid;
  double best_phi = -std::numbers::pi;
  double best = loss(best_phi);
  for (int k = 1; k < grid; ++k) {
    const double phi = -std::numbers::pi + k * h;
    const double v = loss(phi);
    if (v < best) {
      best = v;
      best_phi = phi;
    }
  }
  const auto refined = boost::math::tools::brent_find_minima(loss, best_phi - h, best_phi + h, 52);
  if (refined.second < best) best_phi = refined.first;

  const Complex z = overlap(best_phi);
  DispersiveFidelity out;
  out.fidelity = std::min(1.0, std::norm(z));
  out.global_phase = std::arg(z);
  out.rotation_angle = std::remainder(best_phi, kTwoPi);
  return out;
}

}  // namespace phasewalk
