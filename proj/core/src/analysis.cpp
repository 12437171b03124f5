#include "phasewalk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "phasewalk/errors.hpp"

namespace phasewalk {

namespace {

constexpr double kClipTolerance = 1e-12;

void check_grid(int s, int walker_dim, GridMode mode) {
  if (s < 1) throw ConfigError("phase grid size must be >= 1");
  if (mode == GridMode::complete && s != walker_dim) {
    std::ostringstream os;
    os << "phase grid of " << s << " points does not match walker dimension " << walker_dim
       << "; use GridMode::renormalized to oversample";
    throw ConfigError(os.str());
  }
}

PhaseDistribution finish(std::vector<double> probs, double offset, GridMode mode) {
  for (double& p : probs) {
    if (p < -kClipTolerance) throw NumericalError("negative phase probability; walker state is not positive");
    p = std::max(p, 0.0);
  }
  PhaseDistribution dist{std::move(probs), offset, mode == GridMode::renormalized};
  if (dist.renormalized) {
    const double total = dist.total();
    if (!(total > 0.0)) throw NumericalError("phase distribution has zero total weight");
    for (double& p : dist.probs) p /= total;
  }
  return dist;
}

}  // namespace

CMatrix reduce_walker(const StateVector& state) {
  if (state.coin_dim() != 2) throw DimensionError("reduce_walker needs a state with a coin");
  const int d = state.fock_dim();
  // Rows of m are walker indices, columns coin indices.
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      state.amplitudes().data(), d, 2);
  return m * m.adjoint();
}

double PhaseDistribution::theta(int j) const { return offset + kTwoPi * j / size(); }

double PhaseDistribution::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

PhaseDistribution phase_distribution(const CMatrix& rho_walker, int s, GridMode mode, double offset) {
  const int d = static_cast<int>(rho_walker.rows());
  check_grid(s, d, mode);
  std::vector<double> probs(s);
  CVector bra(d);
  for (int j = 0; j < s; ++j) {
    const double theta = offset + kTwoPi * j / s;
    for (int n = 0; n < d; ++n) bra[n] = std::polar(1.0 / std::sqrt(double(s)), n * theta);
    probs[j] = bra.dot(rho_walker * bra).real();
  }
  return finish(std::move(probs), offset, mode);
}

PhaseDistribution phase_distribution(const StateVector& state, int s, GridMode mode, double offset) {
  const int d = state.fock_dim();
  check_grid(s, d, mode);
  const double scale = 1.0 / std::sqrt(double(s));
  std::vector<double> probs(s);
  for (int j = 0; j < s; ++j) {
    const double theta = offset + kTwoPi * j / s;
    // <theta_j| (x) <c| psi  for each coin value c.
    std::vector<Complex> amp(state.coin_dim(), Complex{0.0, 0.0});
    for (int n = 0; n < d; ++n) {
      const Complex phase = std::polar(1.0, -n * theta);
      for (int c = 0; c < state.coin_dim(); ++c) amp[c] += phase * state.at(n, c);
    }
    double p = 0.0;
    for (const Complex& a : amp) p += std::norm(a);
    probs[j] = p * scale * scale;
  }
  return finish(std::move(probs), offset, mode);
}

double wrap_angle(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

CircularSpread circular_std(const PhaseDistribution& dist) {
  Complex resultant{0.0, 0.0};
  for (int j = 0; j < dist.size(); ++j) resultant += dist.probs[j] * std::polar(1.0, dist.theta(j));
  CircularSpread out;
  if (std::abs(resultant) < 1e-12) {
    out.degenerate_mean = true;
    out.mean = 0.0;
  } else {
    out.mean = std::arg(resultant);
  }
  out.sigma = centered_std(dist, out.mean);
  return out;
}

double centered_std(const PhaseDistribution& dist, double center) {
  double var = 0.0;
  for (int j = 0; j < dist.size(); ++j) {
    const double d = wrap_angle(dist.theta(j) - center);
    var += dist.probs[j] * d * d;
  }
  return std::sqrt(var);
}

bool FitWindow::contains(int step) const {
  return step >= first && step <= last && stride > 0 && (step - first) % stride == 0;
}

FitResult fit_power_law(const std::vector<SpreadSample>& samples, const FitWindow& window) {
  if (window.stride < 1) throw ConfigError("fit window stride must be >= 1");
  std::vector<double> x;
  std::vector<double> y;
  for (const SpreadSample& s : samples) {
    if (!window.contains(s.step)) continue;
    if (s.step <= 0 || !(s.sigma > 0.0)) {
      std::ostringstream os;
      os << "power-law fit needs positive step and sigma, got step " << s.step << ", sigma " << s.sigma;
      throw std::domain_error(os.str());
    }
    x.push_back(std::log(double(s.step)));
    y.push_back(std::log(s.sigma));
  }
  if (x.size() < 3) {
    std::ostringstream os;
    os << "fit window " << window.first << ".." << window.last << " selects " << x.size()
       << " points; at least 3 are needed";
    throw ConfigError(os.str());
  }

  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  FitResult fit;
  fit.window = window;
  fit.points = static_cast<int>(x.size());
  fit.zeta = sxy / sxx;
  fit.xi = my - fit.zeta * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.zeta * x[i] + fit.xi);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

PhaseDistribution classical_rw_distribution(int steps, double delta_theta, int s) {
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (s < 1) throw ConfigError("phase grid size must be >= 1");

  // Row of C(steps, k) / 2^steps; exact in binary floating point for the
  // step counts used here.
  std::vector<double> weights{1.0};
  for (int t = 0; t < steps; ++t) {
    std::vector<double> next(weights.size() + 1, 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      next[k] += 0.5 * weights[k];
      next[k + 1] += 0.5 * weights[k];
    }
    weights = std::move(next);
  }

  const double spacing = kTwoPi / s;
  std::vector<double> probs(s, 0.0);
  auto deposit = [&](long long index, double mass) {
    long long j = index % s;
    if (j < 0) j += s;
    probs[j] += mass;
  };
  for (int k = 0; k <= steps; ++k) {
    const double u = (2 * k - steps) * delta_theta / spacing;
    const double lower = std::floor(u);
    const double frac = u - lower;
    if (std::abs(frac - 0.5) < 1e-9) {
      deposit(static_cast<long long>(lower), 0.5 * weights[k]);
      deposit(static_cast<long long>(lower) + 1, 0.5 * weights[k]);
    } else {
      deposit(std::llround(u), weights[k]);
    }
  }
  return PhaseDistribution{std::move(probs), 0.0, false};
}

std::vector<int> local_maxima(const PhaseDistribution& dist) {
  const int s = dist.size();
  std::vector<int> peaks;
  if (s < 3) return peaks;
  for (int j = 0; j < s; ++j) {
    const double left = dist.probs[(j + s - 1) % s];
    const double right = dist.probs[(j + 1) % s];
    if (dist.probs[j] > left && dist.probs[j] >= right) peaks.push_back(j);
  }
  return peaks;
}

std::vector<int> dominant_peaks(const PhaseDistribution& dist, double relative_threshold) {
  const double top = dist.probs.empty() ? 0.0 : *std::max_element(dist.probs.begin(), dist.probs.end());
  std::vector<int> out;
  for (int j : local_maxima(dist)) {
    if (dist.probs[j] >= relative_threshold * top) out.push_back(j);
  }
  return out;
}

}  // namespace phasewalk
