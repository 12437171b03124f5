#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "phasewalk/analysis.hpp"
#include "phasewalk/cqed_walk.hpp"
#include "phasewalk/errors.hpp"
#include "phasewalk/ideal_walk.hpp"
#include "test_support.hpp"

namespace pw = phasewalk;
using pw::CMatrix;
using pw::Complex;
using pw::testing::max_abs_diff;

namespace {

const std::vector<double> kEpsilons{0.01, 0.012, 0.015, 0.018};

pw::StateVector default_initial(int fock_dim = 64) {
  pw::IdealWalkConfig cfg;
  cfg.fock_dim = fock_dim;
  return pw::initial_state(cfg);
}

std::vector<double> sorted_eigenvalues(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + h.rows());
  std::sort(out.begin(), out.end());
  return out;
}

// Exact JC spectrum from the 2x2 blocks {|N-1, e>, |N, g>}, shifted by
// -omega_d (N - 1/2) for the frame rotating at omega_d. Angular units.
std::vector<double> jc_block_spectrum(const pw::CqedParams& p) {
  const double wc = pw::angular(p.omega_c);
  const double wq = pw::angular(p.omega_q);
  const double g = pw::angular(p.g);
  const double wd = pw::angular(p.omega_d);
  const int d = p.fock_dim;
  std::vector<double> out;
  out.push_back(-wq / 2 + wd / 2);  // |0, g>
  for (int N = 1; N < d; ++N) {
    const double e1 = wc * (N - 1) + wq / 2;
    const double e2 = wc * N - wq / 2;
    const double mean = 0.5 * (e1 + e2);
    const double half = std::sqrt(0.25 * (e1 - e2) * (e1 - e2) + g * g * N);
    out.push_back(mean - half - wd * (N - 0.5));
    out.push_back(mean + half - wd * (N - 0.5));
  }
  out.push_back(wc * (d - 1) + wq / 2 - wd * (d - 0.5));  // |d-1, e>, partner truncated
  std::sort(out.begin(), out.end());
  return out;
}

double total_variation(const pw::PhaseDistribution& a, const pw::PhaseDistribution& b) {
  double tv = 0.0;
  for (int j = 0; j < a.size(); ++j) tv += std::abs(a.probs[j] - b.probs[j]);
  return 0.5 * tv;
}

}  // namespace

TEST(QubitSplitting, HalfGateChargeGivesTwiceTunneling) {
  EXPECT_DOUBLE_EQ(pw::qubit_splitting({1.0, 0.5, 0.35}), 0.7);
}

TEST(QubitSplitting, NoTunneling) { EXPECT_NEAR(pw::qubit_splitting({1.3, 0.2, 0.0}), 1.3 * 0.6, 1e-15); }

TEST(QubitSplitting, GeneralCase) {
  EXPECT_NEAR(pw::qubit_splitting({1.0, 0.25, 0.3}), std::sqrt(0.25 + 0.36), 1e-15);
  EXPECT_NEAR(pw::qubit_splitting({1.0, 0.25, 0.3}), 0.781024967590665, 1e-14);
}

TEST(QubitSplitting, RejectsBadCircuit) {
  EXPECT_THROW(pw::qubit_splitting({0.0, 0.5, 0.3}), pw::ConfigError);
  EXPECT_THROW(pw::qubit_splitting({1.0, 1.5, 0.3}), pw::ConfigError);
}

TEST(CqedParams, DispersiveCheck) {
  pw::CqedParams p;
  EXPECT_NO_THROW(p.validate());
  p.g = 0.05;
  EXPECT_THROW(p.validate(), pw::ConfigError);
  p.allow_nondispersive = true;
  EXPECT_NO_THROW(p.validate());
  p.allow_nondispersive = false;
  EXPECT_NO_THROW(p.validate(false));
}

TEST(DispersiveRates, ZeroDetuningRejected) {
  pw::CqedParams p;
  p.omega_q = p.omega_c;
  p.allow_nondispersive = true;
  EXPECT_THROW(pw::dispersive_rates(p), pw::ConfigError);
}

TEST(BuildJc, DecoupledLimitIsDiagonal) {
  pw::CqedParams p;
  p.g = 0.0;
  p.fock_dim = 6;
  const CMatrix h = pw::build_jc(p).matrix();
  EXPECT_LT(max_abs_diff(h, CMatrix(h.diagonal().asDiagonal())), 1e-15);
  for (int n = 0; n < 6; ++n) {
    EXPECT_NEAR(h(2 * n, 2 * n).real(), pw::angular(0.5 * n + 0.35), 1e-12);
    EXPECT_NEAR(h(2 * n + 1, 2 * n + 1).real(), pw::angular(0.5 * n - 0.35), 1e-12);
  }
}

TEST(BuildJc, SingleExcitationSplitting) {
  pw::CqedParams p;
  p.fock_dim = 4;
  const CMatrix h = pw::build_jc(p).matrix();
  // |0, e> = index 0, |1, g> = index 3
  CMatrix block(2, 2);
  block << h(0, 0), h(0, 3), h(3, 0), h(3, 3);
  const auto ev = sorted_eigenvalues(block);
  const double delta = pw::angular(0.2);
  const double g = pw::angular(0.01);
  EXPECT_NEAR(ev[1] - ev[0], std::sqrt(delta * delta + 4 * g * g), 1e-12);
}

TEST(BuildJc, IsHermitian) {
  pw::CqedParams p;
  p.fock_dim = 16;
  EXPECT_LT(pw::hermiticity_error(pw::build_jc(p).matrix()), 1e-15);
}

TEST(BuildRotatingFull, ZeroFrameReducesToJc) {
  pw::CqedParams p;
  p.fock_dim = 10;
  p.epsilon = 0.0;
  p.omega_d = 0.0;
  EXPECT_LT(max_abs_diff(pw::build_rotating_full(p).matrix(), pw::build_jc(p).matrix()), 1e-15);
}

TEST(BuildRotatingFull, ResonantFrameKeepsOnlyCouplings) {
  pw::CqedParams p;
  p.fock_dim = 10;
  p.omega_c = p.omega_q = p.omega_d = 0.6;
  p.allow_nondispersive = true;
  const CMatrix h = pw::build_rotating_full(p).matrix();
  EXPECT_LT(h.diagonal().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT(h.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BuildRotatingFull, SpectrumMatchesShiftedJcBlocks) {
  pw::CqedParams p;
  p.fock_dim = 12;
  p.epsilon = 0.0;
  const auto got = sorted_eigenvalues(pw::build_rotating_full(p).matrix());
  const auto want = jc_block_spectrum(p);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10) << i;
}

TEST(BuildEffective, DefaultChi) {
  const auto r = pw::dispersive_rates(pw::CqedParams{});
  EXPECT_NEAR(r.chi, 5e-4, 1e-18);
  EXPECT_NEAR(r.omega2, 1e-3, 1e-18);
  EXPECT_EQ(r.delta1, 0.0);
  EXPECT_NEAR(r.delta2, 0.2, 1e-15);
}

TEST(BuildEffective, NoDriveIsDiagonal) {
  pw::CqedParams p;
  p.fock_dim = 8;
  p.epsilon = 0.0;
  const CMatrix h = pw::build_effective(p).matrix();
  EXPECT_EQ(max_abs_diff(h, CMatrix(h.diagonal().asDiagonal())), 0.0);
}

TEST(BuildEffective, ResonantDriveHasNoBias) {
  pw::CqedParams p;
  p.fock_dim = 4;
  p.epsilon = 0.0;
  const CMatrix h = pw::build_effective(p).matrix();
  // n = 0: only the (delta1 / 2) sigma_z term survives on the diagonal.
  EXPECT_EQ(std::abs(h(0, 0)), 0.0);
  EXPECT_EQ(std::abs(h(1, 1)), 0.0);
}

TEST(MakeSchedule, DefaultTimes) {
  const auto s = pw::make_schedule(pw::CqedParams{}, 0.3);
  EXPECT_NEAR(s.t_pulse, 250.0, 1e-9);
  EXPECT_NEAR(s.t_free, 0.3 / (pw::kTwoPi * 5e-4), 1e-9);
  EXPECT_NEAR(s.t_free, 95.49296585513720, 1e-9);
  EXPECT_NEAR(s.nominal_delta_theta, pw::angular(5e-4) * s.t_free, 1e-12);
  ASSERT_EQ(s.segments.size(), 2u);
  EXPECT_EQ(s.segments[0].kind, pw::SegmentKind::drive_on);
  EXPECT_EQ(s.segments[1].kind, pw::SegmentKind::drive_off);
}

TEST(MakeSchedule, FreeTimeIsLinearInStep) {
  const auto a = pw::make_schedule(pw::CqedParams{}, 0.3);
  const auto b = pw::make_schedule(pw::CqedParams{}, 0.6);
  EXPECT_EQ(b.t_free, 2.0 * a.t_free);
  EXPECT_EQ(b.t_pulse, a.t_pulse);
}

TEST(MakeSchedule, WholeStepAccounting) {
  const auto s = pw::make_schedule(pw::CqedParams{}, 0.3, {std::numbers::pi / 4, pw::PhaseAccounting::whole_step_mod_2pi});
  const double chi = pw::angular(5e-4);
  EXPECT_NEAR(std::remainder(chi * (s.t_pulse + s.t_free) - 0.3, pw::kTwoPi), 0.0, 1e-9);
  EXPECT_GT(s.t_free, 0.0);
}

TEST(MakeSchedule, RejectsUndrivenOrUncoupled) {
  pw::CqedParams p;
  p.epsilon = 0.0;
  EXPECT_THROW(pw::make_schedule(p, 0.3), pw::ConfigError);
  p = {};
  p.g = 0.0;
  EXPECT_THROW(pw::make_schedule(p, 0.3), pw::ConfigError);
}

TEST(CompensatedSchedule, ZeroPredictionMatchesPlainSchedule) {
  const auto a = pw::make_schedule(pw::CqedParams{}, 0.3);
  const auto b = pw::compensated_schedule(pw::CqedParams{}, 0.3, 0.0);
  EXPECT_EQ(a.t_pulse, b.t_pulse);
  EXPECT_EQ(a.t_free, b.t_free);
  EXPECT_EQ(a.omega_d, b.omega_d);
}

TEST(CompensatedSchedule, ZeroChiBehavesLikePlainSchedule) {
  pw::CqedParams p;
  p.g = 0.0;
  EXPECT_THROW(pw::make_schedule(p, 0.3), pw::ConfigError);
  EXPECT_THROW(pw::compensated_schedule(p, 0.3, 9.0), pw::ConfigError);
}

TEST(CompensatedSchedule, DriveShiftForNinePhotons) {
  const auto s = pw::compensated_schedule(pw::CqedParams{}, 0.3, 9.0);
  EXPECT_NEAR(s.omega_d - 0.7, 9e-3, 1e-15);
}

TEST(RunCqed, ZeroStepsReturnsInitial) {
  const auto states = pw::run_cqed(pw::CqedParams{}, pw::make_schedule(pw::CqedParams{}, 0.3), 0, default_initial());
  ASSERT_EQ(states.size(), 1u);
  EXPECT_EQ(max_abs_diff(states[0].amplitudes(), default_initial().amplitudes()), 0.0);
}

TEST(RunCqed, UndrivenWalkRotatesRigidly) {
  pw::CqedParams p;
  p.fock_dim = 32;
  const auto schedule = pw::make_schedule(p, 0.3);
  p.epsilon = 0.0;
  const auto initial = pw::StateVector::with_coin(pw::coherent_state({2.0, 0.0}, 32).state, 1.0, 0.0);
  const auto states = pw::run_cqed(p, schedule, 5, initial);
  for (std::size_t k = 1; k < states.size(); ++k) {
    const Complex ratio1 = states[k].at(1, 0) / initial.at(1, 0);
    for (int n = 0; n < 20; ++n) {
      EXPECT_NEAR(std::abs(states[k].at(n, 0)), std::abs(initial.at(n, 0)), 1e-12);
      EXPECT_EQ(std::abs(states[k].at(n, 1)), 0.0);
      // Phase linear in n: a rigid rotation of the phase distribution.
      const Complex ratio = states[k].at(n, 0) / initial.at(n, 0);
      const Complex ratio0 = states[k].at(0, 0) / initial.at(0, 0);
      EXPECT_NEAR(std::abs(ratio - ratio0 * std::pow(ratio1 / ratio0, n)), 0.0, 1e-9) << "n=" << n;
    }
  }
}

TEST(RunCqed, FourthStepHasThreeMainPeaks) {
  const pw::CqedParams p;
  const auto states = pw::run_cqed(p, pw::make_schedule(p, 0.3), 4, default_initial());
  const auto s = pw::make_schedule(p, 0.3);
  const double ref = 4 * pw::frame_rotation_per_step(p, s);
  const auto dist = pw::phase_distribution(states[4], 64, pw::GridMode::complete, pw::wrap_angle(ref));
  EXPECT_EQ(pw::dominant_peaks(dist, 0.1).size(), 3u);
}

TEST(DispersiveFidelity, UncoupledModelsCoincide) {
  const pw::CqedParams nominal;
  const auto schedule = pw::make_schedule(nominal, 0.3);
  pw::CqedParams p = nominal;
  p.g = 0.0;
  p.fock_dim = 32;
  const auto f = pw::dispersive_fidelity(p, schedule, default_initial(32));
  EXPECT_NEAR(f.fidelity, 1.0, 1e-9);
}

TEST(DispersiveFidelity, DefaultParametersAboveThreshold) {
  const pw::CqedParams p;
  const auto f = pw::dispersive_fidelity(p, pw::make_schedule(p, 0.3), default_initial());
  EXPECT_GE(f.fidelity, 0.99);
}

TEST(DispersiveFidelity, LowerOutsideDispersiveRegime) {
  pw::CqedParams nominal;
  nominal.fock_dim = 48;
  const auto schedule = pw::make_schedule(nominal, 0.3);
  const double inside = pw::dispersive_fidelity(nominal, schedule, default_initial(48)).fidelity;
  pw::CqedParams strong = nominal;
  strong.g = 0.1;  // g / delta = 0.5
  strong.allow_nondispersive = true;
  const double outside = pw::dispersive_fidelity(strong, schedule, default_initial(48)).fidelity;
  EXPECT_LT(outside, inside);
}

// Invariants.

TEST(CqedProperty, SegmentPropagatorsUnitaryAndNormsPreserved) {
  for (double eps : kEpsilons) {
    pw::CqedParams p;
    p.epsilon = eps;
    const auto s = pw::make_schedule(p, 0.3);
    for (double e : {eps, 0.0}) {
      pw::CqedParams q = p;
      q.epsilon = e;
      const auto u = pw::propagator(pw::build_effective(q), e > 0 ? s.t_pulse : s.t_free);
      EXPECT_LT(pw::unitarity_error(u.matrix()), 1e-9);
    }
    for (const auto& state : pw::run_cqed(p, s, 25, default_initial())) EXPECT_LT(std::abs(state.norm() - 1.0), 1e-8);
  }
}

TEST(CqedProperty, FreeSegmentConservesPhotonNumber) {
  pw::CqedParams p;
  const auto s = pw::make_schedule(p, 0.3);
  p.epsilon = 0.0;
  const auto u = pw::propagator(pw::build_effective(p), s.t_free);
  pw::testing::Gen gen(17);
  auto psi = default_initial();
  for (int k = 0; k < 5; ++k) {
    const auto next = u.apply(psi);
    EXPECT_LT(std::abs(next.mean_photon_number() - psi.mean_photon_number()), 1e-10);
    psi = pw::StateVector::normalized(next.amplitudes() + 0.1 * gen.state(64, 2).amplitudes(), 64, 2);
  }
}

TEST(CqedProperty, PhotonDriftGrowsWithDrive) {
  std::vector<double> drift;
  for (double eps : kEpsilons) {
    pw::CqedParams p;
    p.epsilon = eps;
    const auto states = pw::run_cqed(p, pw::make_schedule(p, 0.3), 4, default_initial());
    drift.push_back(std::abs(states[4].mean_photon_number() - 9.0));
  }
  for (double d : drift) EXPECT_GT(d, 0.0);
  for (std::size_t i = 1; i < drift.size(); ++i) {
    EXPECT_GT(drift[i], drift[i - 1]) << "drift " << drift[i - 1] << " -> " << drift[i];
  }
}

TEST(CqedProperty, UndisplacedWalkReproducesIdealWalk) {
  const pw::CqedParams p;
  const auto s = pw::make_schedule(p, 0.3);
  pw::CqedRunOptions options;
  options.terms.displacement = false;
  const auto cqed = pw::run_cqed(p, s, 4, default_initial(), options);
  const auto ideal = pw::run_ideal({});
  const double ref = pw::wrap_angle(4 * pw::frame_rotation_per_step(p, s));
  const auto a = pw::phase_distribution(cqed[4], 64, pw::GridMode::complete, ref);
  const auto b = pw::phase_distribution(ideal[4], 64);
  EXPECT_LT(total_variation(a, b), 0.05);
}
