#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "phasewalk/analysis.hpp"
#include "phasewalk/errors.hpp"
#include "phasewalk/ideal_walk.hpp"
#include "test_support.hpp"

namespace pw = phasewalk;
using pw::CMatrix;
using pw::Complex;
using pw::CVector;
using pw::testing::Gen;
using pw::testing::max_abs_diff;

namespace {

const double kR = 1.0 / std::numbers::sqrt2;

CVector coin_vec(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(HadamardCoin, ActionOnBasis) {
  const auto h = pw::hadamard_coin();
  EXPECT_LT(max_abs_diff(h.matrix() * coin_vec(1, 0), coin_vec(kR, kR)), 1e-15);
  EXPECT_LT(max_abs_diff(h.matrix() * coin_vec(0, 1), coin_vec(kR, -kR)), 1e-15);
  EXPECT_LT(max_abs_diff((h * h).matrix(), CMatrix::Identity(2, 2)), 1e-15);
}

TEST(ConditionalPhase, ZeroStepIsIdentity) {
  EXPECT_LT(max_abs_diff(pw::conditional_phase(0.0, 10).matrix(), CMatrix::Identity(20, 20)), 0.0 + 1e-300);
}

TEST(ConditionalPhase, PhaseOnFirstFockState) {
  const auto e = pw::conditional_phase(0.3, 4);
  const auto out = e.apply(pw::StateVector::basis(4, 2, 1, 0));
  EXPECT_NEAR(std::abs(out.at(1, 0) - std::polar(1.0, 0.3)), 0.0, 1e-15);
  const auto down = e.apply(pw::StateVector::basis(4, 2, 1, 1));
  EXPECT_NEAR(std::abs(down.at(1, 1) - std::polar(1.0, -0.3)), 0.0, 1e-15);
}

TEST(ConditionalPhase, ShiftsPhaseStatesByOneGridPoint) {
  const int s = 16;
  const auto e = pw::conditional_phase(pw::kTwoPi / s, s);
  for (int k = 0; k < s; ++k) {
    const auto in = pw::StateVector::with_coin(pw::phase_state(s, k), 1.0, 0.0);
    const auto expected = pw::StateVector::with_coin(pw::phase_state(s, (k + 1) % s), 1.0, 0.0);
    EXPECT_LT(max_abs_diff(e.apply(in).amplitudes(), expected.amplitudes()), 1e-12) << "k=" << k;
  }
}

TEST(RunIdeal, ZeroStepsReturnsInitialState) {
  pw::IdealWalkConfig cfg;
  cfg.steps = 0;
  const auto states = pw::run_ideal(cfg);
  ASSERT_EQ(states.size(), 1u);
  EXPECT_LT(max_abs_diff(states[0].amplitudes(), pw::initial_state(cfg).amplitudes()), 0.0 + 1e-300);
}

TEST(RunIdeal, VacuumAcquiresNoPhase) {
  for (double dtheta : {0.1, 0.3, 2.0}) {
    pw::IdealWalkConfig cfg;
    cfg.steps = 1;
    cfg.fock_dim = 6;
    cfg.delta_theta = dtheta;
    cfg.initial_walker = pw::CoherentWalker{{0.0, 0.0}};
    cfg.initial_coin = {1.0, 0.0};
    const auto states = pw::run_ideal(cfg);
    ASSERT_EQ(states.size(), 2u);
    EXPECT_NEAR(std::abs(states[1].at(0, 0) - kR), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(states[1].at(0, 1) - kR), 0.0, 1e-15);
  }
}

TEST(RunIdeal, FourStepsMatchOracle) {
  pw::IdealWalkConfig cfg;
  cfg.steps = 4;
  const auto states = pw::run_ideal(cfg);
  auto oracle = pw::initial_state(cfg);
  for (int k = 1; k <= 4; ++k) {
    oracle = pw::oracle_step(oracle, cfg.delta_theta);
    EXPECT_LT(max_abs_diff(states[k].amplitudes(), oracle.amplitudes()), 1e-10) << "step " << k;
  }
}

TEST(RunIdeal, RejectsInvalidConfig) {
  pw::IdealWalkConfig cfg;
  cfg.delta_theta = 0.0;
  EXPECT_THROW(pw::run_ideal(cfg), pw::ConfigError);
  cfg.delta_theta = std::numbers::pi;
  EXPECT_THROW(pw::run_ideal(cfg), pw::ConfigError);
  cfg.delta_theta = 0.3;
  cfg.steps = -1;
  EXPECT_THROW(pw::run_ideal(cfg), pw::ConfigError);
  cfg.steps = 3;
  cfg.initial_coin = {1.0, 1.0};
  EXPECT_THROW(pw::run_ideal(cfg), pw::ConfigError);
}

TEST(OracleStep, AgreesWithMatrixStepOnRandomState) {
  Gen gen(99);
  const auto psi = gen.state(8, 2);
  const auto u = pw::step_unitary(0.37, 8);
  EXPECT_LT(max_abs_diff(u.apply(psi).amplitudes(), pw::oracle_step(psi, 0.37).amplitudes()), 1e-12);
}

TEST(OracleStep, ZeroStepOnlyMixesCoin) {
  Gen gen(5);
  const auto psi = gen.state(6, 2);
  const auto out = pw::oracle_step(psi, 0.0);
  for (int n = 0; n < 6; ++n) {
    EXPECT_NEAR(std::abs(out.at(n, 0) - kR * (psi.at(n, 0) + psi.at(n, 1))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out.at(n, 1) - kR * (psi.at(n, 0) - psi.at(n, 1))), 0.0, 1e-15);
  }
}

TEST(OracleStep, VacuumModulusUnchanged) {
  Gen gen(6);
  const auto psi = gen.state(6, 2);
  const auto out = pw::oracle_step(psi, 1.1);
  const double before = std::norm(psi.at(0, 0)) + std::norm(psi.at(0, 1));
  const double after = std::norm(out.at(0, 0)) + std::norm(out.at(0, 1));
  EXPECT_NEAR(before, after, 1e-15);
}

// Properties over the default walk.

TEST(IdealWalkProperty, NormPreservedOverTwentyFiveSteps) {
  for (const auto& state : pw::run_ideal({})) EXPECT_LT(std::abs(state.norm() - 1.0), 1e-9);
}

TEST(IdealWalkProperty, PhotonDistributionIsInvariant) {
  const auto states = pw::run_ideal({});
  const auto p0 = states.front().photon_distribution();
  const double n0 = states.front().mean_photon_number();
  for (const auto& state : states) {
    const auto p = state.photon_distribution();
    for (std::size_t n = 0; n < p.size(); ++n) EXPECT_NEAR(p[n], p0[n], 1e-10);
    EXPECT_NEAR(state.mean_photon_number(), n0, 1e-10);
  }
}

TEST(IdealWalkProperty, BalancedCoinGivesSymmetricDistribution) {
  const auto states = pw::run_ideal({});
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto dist = pw::phase_distribution(states[k], 64);
    for (int j = 1; j < 64; ++j) EXPECT_NEAR(dist.probs[j], dist.probs[64 - j], 1e-8) << "step " << k;
  }
}

TEST(IdealWalkProperty, MatrixAndOracleAgreeOnRandomConfigs) {
  Gen gen(31337);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = gen.integer(2, 32);
    const int steps = gen.integer(0, 10);
    const double dtheta = gen.uniform(0.01, 3.1);
    auto psi = gen.state(dim, 2);
    auto oracle = psi;
    const auto u = pw::step_unitary(dtheta, dim);
    for (int k = 0; k < steps; ++k) {
      psi = u.apply(psi);
      oracle = pw::oracle_step(oracle, dtheta);
    }
    EXPECT_LT(max_abs_diff(psi.amplitudes(), oracle.amplitudes()), 1e-10) << "trial " << trial;
  }
}
