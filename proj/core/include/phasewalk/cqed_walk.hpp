#pragma once

// Phase-space walk realised by a driven double quantum dot (the coin) coupled
// dispersively to a resonator mode (the walker).
//
// One walk step is a drive-on segment, whose sigma_x term rotates the coin,
// followed by a drive-off segment in which chi a^dagger a sigma_z rotates the
// field clockwise or counter-clockwise depending on the coin. All parameters
// are linear frequencies in GHz; Hamiltonians are built in rad/ns.

#include <numbers>
#include <vector>

#include "phasewalk/quantum_core.hpp"

namespace phasewalk {

struct QubitCircuitParams {
  double charging_energy = 1.0;  // E_c, GHz
  double gate_charge = 0.5;      // N_g in [0, 1]
  double tunneling = 0.35;       // Delta, GHz

  void validate() const;
};

// sqrt(E_c^2 (1 - 2 N_g)^2 + 4 Delta^2), GHz
double qubit_splitting(const QubitCircuitParams& params);

struct CqedParams {
  double omega_c = 0.5;   // resonator
  double omega_q = 0.7;   // qubit splitting Omega
  double g = 0.01;        // vacuum Rabi coupling
  double omega_d = 0.7;   // drive; qubit-resonant by default
  double epsilon = 0.01;  // drive amplitude
  int fock_dim = 64;
  bool allow_nondispersive = false;

  // Field checks, plus |Omega - omega_c| >= 10 g unless allow_nondispersive
  // (or require_dispersive is false). Throws ConfigError.
  void validate(bool require_dispersive = true) const;
};

inline constexpr double kDispersiveRatioLimit = 0.1;

// Coefficients of the effective Hamiltonian, linear GHz.
struct DispersiveRates {
  double delta;   // Omega - omega_c
  double delta1;  // omega_d - Omega
  double delta2;  // omega_d - omega_c
  double omega2;  // 2 g epsilon / delta2
  double chi;     // g^2 / delta
};

// Throws ConfigError when delta or delta2 vanish.
DispersiveRates dispersive_rates(const CqedParams& params);

// omega_c a^dagger a + (Omega/2) sigma_z + g (a^dagger sigma_- + a sigma_+)
HermitianOperator build_jc(const CqedParams& params);

// Jaynes-Cummings plus the resonator drive, in the frame rotating at omega_d
// for both qubit and field, where it is time independent.
HermitianOperator build_rotating_full(const CqedParams& params);

struct EffectiveTerms {
  bool displacement = true;  // epsilon (a^dagger + a); off only as a test hook
};

// chi n sigma_z - (delta1/2) sigma_z - delta2 n + (Omega2/2) sigma_x
//   + epsilon (a^dagger + a)
HermitianOperator build_effective(const CqedParams& params, EffectiveTerms terms = {});

enum class SegmentKind { drive_on, drive_off };

struct PulseSegment {
  SegmentKind kind;
  double duration;  // ns
};

// How much of the chi n sigma_z phase counts towards the step size.
enum class PhaseAccounting {
  // t_free = dtheta / chi; the phase accrued while the drive is on is
  // treated as an imperfection.
  free_segment_only,
  // t_free is chosen so that chi (t_pulse + t_free) = dtheta (mod 2 pi).
  whole_step_mod_2pi,
};

struct ScheduleOptions {
  double coin_angle = std::numbers::pi / 4.0;  // sigma_x rotation angle
  PhaseAccounting accounting = PhaseAccounting::free_segment_only;
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;  // one step, in time order
  double t_pulse = 0.0;
  double t_free = 0.0;
  double nominal_delta_theta = 0.0;  // chi * t_free for free_segment_only
  double coin_angle = 0.0;
  double omega_d = 0.0;  // drive frequency the segments are built with, GHz
  PhaseAccounting accounting = PhaseAccounting::free_segment_only;

  double step_duration() const;
};

// Requires epsilon > 0 and chi > 0.
PulseSchedule make_schedule(const CqedParams& params, double delta_theta, ScheduleOptions options = {});

// Experimental. Retunes the drive to omega_d + 2 chi predicted_n so the
// sigma_x rotation is resonant for the predicted photon number, then
// rebuilds the pulse for the same coin angle.
PulseSchedule compensated_schedule(const CqedParams& params, double delta_theta, double predicted_n,
                                   ScheduleOptions options = {});

struct CqedRunOptions {
  EffectiveTerms terms;
};

// States after steps 0..N. Segment propagators are computed once per
// (kind, duration) and reused for every step.
std::vector<StateVector> run_cqed(const CqedParams& params, const PulseSchedule& schedule, int steps,
                                  const StateVector& initial, CqedRunOptions options = {});

struct CompensatedRun {
  std::vector<StateVector> states;      // steps 0..N
  std::vector<PulseSchedule> schedules;  // one per step
};

// Each step uses compensated_schedule with the current <n> as prediction.
CompensatedRun run_cqed_compensated(const CqedParams& params, double delta_theta, int steps,
                                    const StateVector& initial, ScheduleOptions options = {});

// Rigid rotation of the phase circle per step caused by -delta2 a^dagger a,
// in rad (not wrapped).
double frame_rotation_per_step(const CqedParams& params, const PulseSchedule& schedule);

struct DispersiveFidelity {
  double fidelity = 0.0;
  double global_phase = 0.0;    // arg <psi_full| R psi_eff>
  double rotation_angle = 0.0;  // R = exp(i angle n)
};

// Evolves `initial` through one step of the schedule with the rotating-frame
// full model and with the effective model, aligns a global phase and a
// uniform rotation of the field, and returns the squared overlap.
DispersiveFidelity dispersive_fidelity(const CqedParams& params, const PulseSchedule& schedule,
                                       const StateVector& initial);

}  // namespace phasewalk
