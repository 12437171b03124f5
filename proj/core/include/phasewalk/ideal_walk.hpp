#pragma once

// Ideal discrete-time quantum walk on the phase circle: a Hadamard coin flip
// followed by the coin-conditioned rotation exp(i n sigma_z dtheta).

#include <variant>
#include <vector>

#include "phasewalk/quantum_core.hpp"

namespace phasewalk {

struct CoherentWalker {
  Complex alpha{3.0, 0.0};
};

// Phase state |theta_k> on the full fock_dim-dimensional walker space.
struct PhaseStateWalker {
  int k = 0;
};

using WalkerSpec = std::variant<CoherentWalker, PhaseStateWalker>;

struct CoinState {
  Complex c0;
  Complex c1;

  // (|0> + i|1>) / sqrt(2)
  static CoinState balanced();
};

struct IdealWalkConfig {
  double delta_theta = 0.3;
  int steps = 25;
  int fock_dim = 64;
  WalkerSpec initial_walker = CoherentWalker{};
  CoinState initial_coin = CoinState::balanced();

  // Throws ConfigError unless 0 < delta_theta < pi, steps >= 0 and the coin
  // has unit norm.
  void validate() const;
};

StateVector make_walker(const WalkerSpec& spec, int fock_dim);
StateVector initial_state(const IdealWalkConfig& config);

UnitaryOperator hadamard_coin();

// Diagonal: e^{+i n dtheta} on coin |0>, e^{-i n dtheta} on coin |1>.
UnitaryOperator conditional_phase(double delta_theta, int fock_dim);

// E (I_w (x) coin); coin defaults to the Hadamard.
UnitaryOperator step_unitary(double delta_theta, int fock_dim);
UnitaryOperator step_unitary(double delta_theta, int fock_dim, const UnitaryOperator& coin);

// States after steps 0..N.
std::vector<StateVector> run_ideal(const IdealWalkConfig& config);

// One walk step done amplitude by amplitude, without building any matrix.
StateVector oracle_step(const StateVector& state, double delta_theta);

}  // namespace phasewalk
