#include "phasewalk/ideal_walk.hpp"

#include <cmath>
#include <numbers>

#include "phasewalk/errors.hpp"

namespace phasewalk {

CoinState CoinState::balanced() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {Complex{r, 0.0}, Complex{0.0, r}};
}

void IdealWalkConfig::validate() const {
  if (!(delta_theta > 0.0 && delta_theta < std::numbers::pi)) {
    throw ConfigError("delta_theta must lie in (0, pi)");
  }
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (fock_dim < 1) throw ConfigError("fock_dim must be >= 1");
  const double norm2 = std::norm(initial_coin.c0) + std::norm(initial_coin.c1);
  if (std::abs(norm2 - 1.0) > 1e-12) throw ConfigError("coin amplitudes must satisfy |c0|^2 + |c1|^2 = 1");
}

StateVector make_walker(const WalkerSpec& spec, int fock_dim) {
  if (const auto* coherent = std::get_if<CoherentWalker>(&spec)) {
    return coherent_state(coherent->alpha, fock_dim).state;
  }
  return phase_state(fock_dim, std::get<PhaseStateWalker>(spec).k);
}

StateVector initial_state(const IdealWalkConfig& config) {
  return StateVector::with_coin(make_walker(config.initial_walker, config.fock_dim),
                                config.initial_coin.c0, config.initial_coin.c1);
}

UnitaryOperator hadamard_coin() {
  const double r = 1.0 / std::numbers::sqrt2;
  return UnitaryOperator(CMatrix{{r, r}, {r, -r}});
}

UnitaryOperator conditional_phase(double delta_theta, int fock_dim) {
  if (fock_dim < 1) throw DimensionError("fock_dim must be >= 1");
  CVector diag(2 * fock_dim);
  for (int n = 0; n < fock_dim; ++n) {
    diag[2 * n] = std::polar(1.0, n * delta_theta);
    diag[2 * n + 1] = std::polar(1.0, -n * delta_theta);
  }
  return UnitaryOperator(CMatrix(diag.asDiagonal()));
}

UnitaryOperator step_unitary(double delta_theta, int fock_dim) {
  return step_unitary(delta_theta, fock_dim, hadamard_coin());
}

UnitaryOperator step_unitary(double delta_theta, int fock_dim, const UnitaryOperator& coin) {
  if (coin.dim() != 2) throw DimensionError("coin operator must be 2x2");
  return conditional_phase(delta_theta, fock_dim) * tensor(UnitaryOperator::identity(fock_dim), coin);
}

std::vector<StateVector> run_ideal(const IdealWalkConfig& config) {
  config.validate();
  std::vector<StateVector> states;
  states.reserve(config.steps + 1);
  states.push_back(initial_state(config));
  if (config.steps == 0) return states;

  const UnitaryOperator step = step_unitary(config.delta_theta, config.fock_dim);
  for (int j = 0; j < config.steps; ++j) states.push_back(step.apply(states.back()));
  return states;
}

StateVector oracle_step(const StateVector& state, double delta_theta) {
  if (state.coin_dim() != 2) throw DimensionError("oracle_step needs a state with a coin");
  const double r = 1.0 / std::numbers::sqrt2;
  CVector out(state.dim());
  for (int n = 0; n < state.fock_dim(); ++n) {
    const Complex up = state.at(n, 0);
    const Complex down = state.at(n, 1);
    out[2 * n] = r * (up + down) * std::polar(1.0, n * delta_theta);
    out[2 * n + 1] = r * (up - down) * std::polar(1.0, -n * delta_theta);
  }
  return StateVector(std::move(out), state.fock_dim(), 2);
}

}  // namespace phasewalk
