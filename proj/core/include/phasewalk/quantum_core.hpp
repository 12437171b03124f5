#pragma once

// Dense linear algebra over the truncated walker (Fock) x coin space.
//
// Composite basis ordering is fixed throughout the library: the walker index
// is slow and the coin index is fast, so |n> (x) |c> lives at n * coin_dim + c.
// Frequencies given by users are linear GHz; everything that enters a
// Hamiltonian matrix is angular (rad/ns), and times are ns.

#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace phasewalk {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Linear frequency in GHz to angular frequency in rad/ns.
constexpr double angular(double ghz) { return kTwoPi * ghz; }

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-9;
inline constexpr double kMaxTruncationLeakage = 1e-6;

class StateVector {
 public:
  // `amplitudes` must already have unit norm within kNormTolerance.
  StateVector(CVector amplitudes, int fock_dim, int coin_dim);

  // Rescales to unit norm; rejects the zero vector.
  static StateVector normalized(CVector amplitudes, int fock_dim, int coin_dim);
  static StateVector basis(int fock_dim, int coin_dim, int n, int coin = 0);
  // walker (coin_dim 1) tensored with the coin state c0|0> + c1|1>.
  static StateVector with_coin(const StateVector& walker, Complex c0, Complex c1);

  const CVector& amplitudes() const { return amplitudes_; }
  int fock_dim() const { return fock_dim_; }
  int coin_dim() const { return coin_dim_; }
  int dim() const { return fock_dim_ * coin_dim_; }

  Complex at(int n, int coin = 0) const { return amplitudes_[n * coin_dim_ + coin]; }
  double norm() const { return amplitudes_.norm(); }
  // <this|other>
  Complex inner(const StateVector& other) const;
  double mean_photon_number() const;
  // P(n) summed over the coin.
  std::vector<double> photon_distribution() const;

 private:
  CVector amplitudes_;
  int fock_dim_;
  int coin_dim_;
};

class HermitianOperator {
 public:
  // Rejects non-square input and anything farther from Hermitian than
  // kHermitianTolerance * max(1, max|entry|).
  explicit HermitianOperator(CMatrix matrix, std::string label = {});

  const CMatrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const std::string& label() const { return label_; }

  double expectation(const StateVector& state) const;

 private:
  CMatrix matrix_;
  std::string label_;
};

class UnitaryOperator {
 public:
  // Rejects input with max|U^dagger U - I| >= kUnitaryTolerance.
  explicit UnitaryOperator(CMatrix matrix);

  const CMatrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  StateVector apply(const StateVector& state) const;
  UnitaryOperator operator*(const UnitaryOperator& rhs) const;

  static UnitaryOperator identity(int dim);

 private:
  CMatrix matrix_;
};

// max_ij |(U^dagger U - I)_ij|
double unitarity_error(const CMatrix& u);
// max_ij |(H - H^dagger)_ij|
double hermiticity_error(const CMatrix& h);

// Truncated coherent state together with the probability mass that the
// truncation dropped (computed from the Poisson tail, before renormalising).
struct CoherentState {
  StateVector state;
  double leakage;
};

// Throws TruncationError when leakage > kMaxTruncationLeakage.
CoherentState coherent_state(Complex alpha, int fock_dim);

// |theta_k> = s^{-1/2} sum_n exp(i n theta_k) |n>, theta_k = 2 pi k / s,
// as walker-only states on an s-dimensional Fock space.
StateVector phase_state(int s, int k);
std::vector<StateVector> phase_states(int s);

struct LadderPauli {
  CMatrix a;
  CMatrix a_dagger;
  CMatrix n_op;
  CMatrix sigma_x;
  CMatrix sigma_y;
  CMatrix sigma_z;  // sigma_z |0> = +|0>
  CMatrix sigma_plus;   // |0><1|
  CMatrix sigma_minus;  // |1><0|
};

LadderPauli ladder_and_pauli(int fock_dim);

// Kronecker product, walker operand first.
CMatrix tensor(const CMatrix& walker_op, const CMatrix& coin_op);
HermitianOperator tensor(const HermitianOperator& walker_op, const HermitianOperator& coin_op);
UnitaryOperator tensor(const UnitaryOperator& walker_op, const UnitaryOperator& coin_op);

// Eigendecomposition of a Hermitian generator, reusable for any time.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const HermitianOperator& generator);

  // exp(-i H t)
  UnitaryOperator at(double t) const;
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  int dim() const { return static_cast<int>(eigenvalues_.size()); }

 private:
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
};

UnitaryOperator propagator(const HermitianOperator& generator, double t);

}  // namespace phasewalk
