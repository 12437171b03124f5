#pragma once

// Phase-space observables: reduced walker state, phase distributions on a
// grid of phase states, spreading measures, and power-law fits.

#include <vector>

#include "phasewalk/quantum_core.hpp"

namespace phasewalk {

// Tr_coin |psi><psi|, fock_dim x fock_dim.
CMatrix reduce_walker(const StateVector& state);

enum class GridMode {
  // Grid size must equal the walker dimension; probabilities sum to 1.
  complete,
  // Any grid size; the overlaps are rescaled to sum to 1. Not a
  // probability-conserving measurement, only for plotting.
  renormalized,
};

// Probabilities over theta_j = offset + 2 pi j / s.
struct PhaseDistribution {
  std::vector<double> probs;
  double offset = 0.0;
  bool renormalized = false;

  int size() const { return static_cast<int>(probs.size()); }
  double theta(int j) const;
  double total() const;
};

PhaseDistribution phase_distribution(const CMatrix& rho_walker, int s, GridMode mode = GridMode::complete,
                                     double offset = 0.0);
// Same quantity straight from the joint state, O(s * dim) instead of O(s * dim^2).
PhaseDistribution phase_distribution(const StateVector& state, int s, GridMode mode = GridMode::complete,
                                     double offset = 0.0);

// Wraps to (-pi, pi].
double wrap_angle(double x);

struct CircularSpread {
  double sigma = 0.0;
  double mean = 0.0;
  bool degenerate_mean = false;  // resultant length < 1e-12; mean taken as 0
};

// sqrt(sum_j p_j wrap(theta_j - mu)^2) about the circular mean mu.
CircularSpread circular_std(const PhaseDistribution& dist);

// sqrt(sum_j p_j wrap(theta_j - center)^2) about a fixed reference phase.
double centered_std(const PhaseDistribution& dist, double center);

struct SpreadSample {
  int step;
  double sigma;
};

// Steps first, first + stride, ... up to last.
struct FitWindow {
  int first = 2;
  int last = 10;
  int stride = 2;

  bool contains(int step) const;
};

struct FitResult {
  double zeta = 0.0;  // slope of ln sigma against ln step
  double xi = 0.0;    // intercept
  FitWindow window;
  int points = 0;
  double residual_rms = 0.0;
};

// Ordinary least squares of ln sigma on ln step over the window. Throws
// ConfigError with fewer than 3 points and std::domain_error for a
// non-positive step or sigma inside the window.
FitResult fit_power_law(const std::vector<SpreadSample>& samples, const FitWindow& window);

// Exact +-dtheta binomial walk, each lattice point's mass moved to the nearest
// grid point (ties split equally).
PhaseDistribution classical_rw_distribution(int steps, double delta_theta, int s);

// Indices j with p[j-1] < p[j] >= p[j+1] (cyclic).
std::vector<int> local_maxima(const PhaseDistribution& dist);

// Local maxima at least `relative_threshold` times the global maximum.
std::vector<int> dominant_peaks(const PhaseDistribution& dist, double relative_threshold);

}  // namespace phasewalk
