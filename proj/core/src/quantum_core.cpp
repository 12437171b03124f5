#include "phasewalk/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

#include "phasewalk/errors.hpp"

namespace phasewalk {

namespace {

void require_dims(int fock_dim, int coin_dim) {
  if (fock_dim < 1) throw DimensionError("fock_dim must be >= 1");
  if (coin_dim != 1 && coin_dim != 2) throw DimensionError("coin_dim must be 1 or 2");
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

// ln P(n) for a Poisson(lambda) variable.
double log_poisson(double lambda, int n) {
  if (lambda == 0.0) return n == 0 ? 0.0 : -INFINITY;
  return -lambda + n * std::log(lambda) - std::lgamma(n + 1.0);
}

// sum_{n >= first} Poisson(lambda)[n]
double poisson_tail(double lambda, int first) {
  if (lambda == 0.0) return first == 0 ? 1.0 : 0.0;
  double term = std::exp(log_poisson(lambda, first));
  double sum = 0.0;
  for (int n = first;; ++n) {
    sum += term;
    term *= lambda / (n + 1.0);
    if (n + 1 > lambda && (term <= 1e-18 * sum || term < 1e-300)) break;
  }
  return sum;
}

}  // namespace

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CVector amplitudes, int fock_dim, int coin_dim)
    : amplitudes_(std::move(amplitudes)), fock_dim_(fock_dim), coin_dim_(coin_dim) {
  require_dims(fock_dim, coin_dim);
  if (amplitudes_.size() != fock_dim * coin_dim) {
    std::ostringstream os;
    os << "state has " << amplitudes_.size() << " amplitudes, expected " << fock_dim << " x "
       << coin_dim;
    throw DimensionError(os.str());
  }
  const double drift = std::abs(amplitudes_.norm() - 1.0);
  if (!(drift < kNormTolerance)) {
    std::ostringstream os;
    os << "state norm deviates from 1 by " << drift;
    throw NumericalError(os.str());
  }
}

StateVector StateVector::normalized(CVector amplitudes, int fock_dim, int coin_dim) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalise a zero or non-finite vector");
  amplitudes /= n;
  return StateVector(std::move(amplitudes), fock_dim, coin_dim);
}

StateVector StateVector::basis(int fock_dim, int coin_dim, int n, int coin) {
  require_dims(fock_dim, coin_dim);
  if (n < 0 || n >= fock_dim || coin < 0 || coin >= coin_dim) {
    throw DimensionError("basis index out of range");
  }
  CVector amps = CVector::Zero(fock_dim * coin_dim);
  amps[n * coin_dim + coin] = 1.0;
  return StateVector(std::move(amps), fock_dim, coin_dim);
}

StateVector StateVector::with_coin(const StateVector& walker, Complex c0, Complex c1) {
  if (walker.coin_dim() != 1) throw DimensionError("with_coin expects a walker-only state");
  const double coin_norm = std::sqrt(std::norm(c0) + std::norm(c1));
  if (std::abs(coin_norm - 1.0) > 1e-12) throw ConfigError("coin amplitudes must have unit norm");
  CVector amps(2 * walker.fock_dim());
  for (int n = 0; n < walker.fock_dim(); ++n) {
    amps[2 * n] = walker.at(n) * c0;
    amps[2 * n + 1] = walker.at(n) * c1;
  }
  return StateVector(std::move(amps), walker.fock_dim(), 2);
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw DimensionError("inner product of states with different dimensions");
  return amplitudes_.dot(other.amplitudes_);
}

double StateVector::mean_photon_number() const {
  double mean = 0.0;
  for (int n = 0; n < fock_dim_; ++n) {
    for (int c = 0; c < coin_dim_; ++c) mean += n * std::norm(at(n, c));
  }
  return mean;
}

std::vector<double> StateVector::photon_distribution() const {
  std::vector<double> p(fock_dim_, 0.0);
  for (int n = 0; n < fock_dim_; ++n) {
    for (int c = 0; c < coin_dim_; ++c) p[n] += std::norm(at(n, c));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Operators

double unitarity_error(const CMatrix& u) {
  const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

double hermiticity_error(const CMatrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

HermitianOperator::HermitianOperator(CMatrix matrix, std::string label)
    : matrix_(std::move(matrix)), label_(std::move(label)) {
  require_square(matrix_, "HermitianOperator");
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  const double err = hermiticity_error(matrix_);
  if (!(err <= kHermitianTolerance * scale)) {
    std::ostringstream os;
    os << "operator '" << label_ << "' is not Hermitian (max |H - H^dagger| = " << err << ")";
    throw NumericalError(os.str());
  }
}

double HermitianOperator::expectation(const StateVector& state) const {
  if (state.dim() != dim()) throw DimensionError("expectation: dimension mismatch");
  return state.amplitudes().dot(matrix_ * state.amplitudes()).real();
}

UnitaryOperator::UnitaryOperator(CMatrix matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "UnitaryOperator");
  const double err = unitarity_error(matrix_);
  if (!(err < kUnitaryTolerance)) {
    std::ostringstream os;
    os << "operator is not unitary (max |U^dagger U - I| = " << err << ")";
    throw NumericalError(os.str());
  }
}

StateVector UnitaryOperator::apply(const StateVector& state) const {
  if (state.dim() != dim()) {
    std::ostringstream os;
    os << "cannot apply a " << dim() << "-dim unitary to a " << state.dim() << "-dim state";
    throw DimensionError(os.str());
  }
  return StateVector(matrix_ * state.amplitudes(), state.fock_dim(), state.coin_dim());
}

UnitaryOperator UnitaryOperator::operator*(const UnitaryOperator& rhs) const {
  if (rhs.dim() != dim()) throw DimensionError("unitary product: dimension mismatch");
  return UnitaryOperator(matrix_ * rhs.matrix_);
}

UnitaryOperator UnitaryOperator::identity(int dim) {
  return UnitaryOperator(CMatrix::Identity(dim, dim));
}

// ---------------------------------------------------------------------------
// States

CoherentState coherent_state(Complex alpha, int fock_dim) {
  if (fock_dim < 1) throw DimensionError("fock_dim must be >= 1");
  const double lambda = std::norm(alpha);
  const double log_mod = lambda > 0.0 ? std::log(std::abs(alpha)) : 0.0;
  const double phase = std::arg(alpha);

  CVector amps = CVector::Zero(fock_dim);
  amps[0] = std::exp(-0.5 * lambda);
  if (lambda > 0.0) {
    for (int n = 1; n < fock_dim; ++n) {
      const double mod = std::exp(-0.5 * lambda + n * log_mod - 0.5 * std::lgamma(n + 1.0));
      amps[n] = std::polar(mod, n * phase);
    }
  }

  const double leakage = poisson_tail(lambda, fock_dim);
  if (leakage > kMaxTruncationLeakage) {
    std::ostringstream os;
    os << "coherent state |alpha|=" << std::abs(alpha) << " leaks " << leakage
       << " of its probability beyond fock_dim=" << fock_dim << "; raise fock_dim";
    throw TruncationError(os.str(), leakage);
  }
  return {StateVector::normalized(std::move(amps), fock_dim, 1), leakage};
}

StateVector phase_state(int s, int k) {
  if (s < 1) throw DimensionError("phase grid size must be >= 1");
  const double theta = kTwoPi * k / s;
  const double amp = 1.0 / std::sqrt(static_cast<double>(s));
  CVector amps(s);
  for (int n = 0; n < s; ++n) amps[n] = std::polar(amp, n * theta);
  return StateVector(std::move(amps), s, 1);
}

std::vector<StateVector> phase_states(int s) {
  std::vector<StateVector> states;
  states.reserve(s);
  for (int k = 0; k < s; ++k) states.push_back(phase_state(s, k));
  return states;
}

LadderPauli ladder_and_pauli(int fock_dim) {
  if (fock_dim < 2) throw DimensionError("ladder operators need fock_dim >= 2");
  LadderPauli ops;
  ops.a = CMatrix::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) ops.a(n - 1, n) = std::sqrt(static_cast<double>(n));
  ops.a_dagger = ops.a.adjoint();
  ops.n_op = CMatrix::Zero(fock_dim, fock_dim);
  for (int n = 0; n < fock_dim; ++n) ops.n_op(n, n) = n;

  const Complex i{0.0, 1.0};
  ops.sigma_x = CMatrix{{0.0, 1.0}, {1.0, 0.0}};
  ops.sigma_y = CMatrix{{0.0, -i}, {i, 0.0}};
  ops.sigma_z = CMatrix{{1.0, 0.0}, {0.0, -1.0}};
  ops.sigma_plus = CMatrix{{0.0, 1.0}, {0.0, 0.0}};
  ops.sigma_minus = CMatrix{{0.0, 0.0}, {1.0, 0.0}};
  return ops;
}

CMatrix tensor(const CMatrix& walker_op, const CMatrix& coin_op) {
  require_square(walker_op, "tensor (walker operand)");
  require_square(coin_op, "tensor (coin operand)");
  return Eigen::kroneckerProduct(walker_op, coin_op).eval();
}

HermitianOperator tensor(const HermitianOperator& walker_op, const HermitianOperator& coin_op) {
  std::string label = walker_op.label() + " (x) " + coin_op.label();
  return HermitianOperator(tensor(walker_op.matrix(), coin_op.matrix()), std::move(label));
}

UnitaryOperator tensor(const UnitaryOperator& walker_op, const UnitaryOperator& coin_op) {
  return UnitaryOperator(tensor(walker_op.matrix(), coin_op.matrix()));
}

// ---------------------------------------------------------------------------
// Propagators

SpectralPropagator::SpectralPropagator(const HermitianOperator& generator) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(generator.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigendecomposition failed for '" << generator.label() << "' (dim " << generator.dim()
       << ", Frobenius norm " << generator.matrix().norm() << ", hermiticity error "
       << hermiticity_error(generator.matrix()) << ")";
    throw NumericalError(os.str());
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

UnitaryOperator SpectralPropagator::at(double t) const {
  CVector phases(eigenvalues_.size());
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) phases[k] = std::polar(1.0, -eigenvalues_[k] * t);
  CMatrix u = eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
  return UnitaryOperator(std::move(u));
}

UnitaryOperator propagator(const HermitianOperator& generator, double t) {
  return SpectralPropagator(generator).at(t);
}

}  // namespace phasewalk
