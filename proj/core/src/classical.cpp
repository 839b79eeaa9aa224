#include "latrev/classical.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "latrev/error.hpp"
#include "latrev/parallel.hpp"
#include "latrev/units.hpp"

namespace latrev::classical {
namespace {

using constants::kPi;
using constants::kTwoPi;

// Yoshida's sixth-order triple-jump weights (solution A).
constexpr double kW1 = -1.17767998417887;
constexpr double kW2 = 0.235573213359357;
constexpr double kW3 = 0.784513610477560;
constexpr double kW0 = 1.0 - 2.0 * (kW1 + kW2 + kW3);
constexpr std::array<double, 7> kYoshida6{kW3, kW2, kW1, kW0, kW1, kW2, kW3};
constexpr std::array<double, 1> kPlain{1.0};

// Newton updates are capped so the iteration cannot jump between islands.
constexpr double kMaxNewtonStep = 0.25;

double force(double z, double tau, double kappa, double lambda) {
  return kappa * std::sin(2.0 * z) - lambda * std::sin(tau);
}

// Kick-drift-kick over [τ, τ+h] with the drive frozen at τ + h/2.
void kdk(PhasePoint& x, double tau, double h, double kappa, double lambda) {
  const double mid = tau + 0.5 * h;
  x.p += 0.5 * h * force(x.z, mid, kappa, lambda);
  x.z += h * x.p;
  x.p += 0.5 * h * force(x.z, mid, kappa, lambda);
}

std::span<const double> weights(int order) {
  if (order == 6) return kYoshida6;
  return kPlain;
}

void step(PhasePoint& x, double tau, double h, const ClassicalParams& params, std::span<const double> w) {
  double t = tau;
  for (double wi : w) {
    kdk(x, t, wi * h, params.kappa, params.lambda);
    t += wi * h;
  }
}

double well_centre(double z) { return kPi / 2.0 + kPi * std::round((z - kPi / 2.0) / kPi); }

// Time within one period at index j, exact at j = 0 and j = steps.
double phase_at(long period, long j, int steps) {
  return kTwoPi * (static_cast<double>(period) + static_cast<double>(j) / steps);
}

}  // namespace

double ClassicalParams::dt() const { return kTwoPi / steps_per_period; }

void validate(const ClassicalParams& params) {
  if (params.steps_per_period < 1) fail(ErrorKind::Validation, "steps_per_period must be positive so dt divides 2π");
  if (params.order != 2 && params.order != 6) fail(ErrorKind::Validation, "integrator order must be 2 or 6");
  if (!std::isfinite(params.kappa) || !std::isfinite(params.lambda)) {
    fail(ErrorKind::Validation, "kappa and lambda must be finite");
  }
}

double energy(const PhasePoint& x, double kappa) { return 0.5 * x.p * x.p + 0.5 * kappa * std::cos(2.0 * x.z); }

PhasePoint advance(PhasePoint x, double tau, long steps, const ClassicalParams& params, int direction) {
  const double h = direction >= 0 ? params.dt() : -params.dt();
  const auto w = weights(params.order);
  for (long k = 0; k < steps; ++k) step(x, tau + static_cast<double>(k) * h, h, params, w);
  return x;
}

Trajectory integrate(const PhasePoint& initial, const ClassicalParams& params, int n_periods, int stride) {
  validate(params);
  if (n_periods < 0) fail(ErrorKind::InvalidInput, "n_periods must be non-negative");
  const int steps = params.steps_per_period;
  if (stride <= 0) stride = steps;
  const double h = params.dt();
  const auto w = weights(params.order);

  Trajectory out;
  const long total = static_cast<long>(n_periods) * steps;
  out.tau.reserve(total / stride + 1);
  out.points.reserve(total / stride + 1);
  out.tau.push_back(0.0);
  out.points.push_back(initial);
  PhasePoint x = initial;
  for (long k = 0; k < total; ++k) {
    const long period = k / steps;
    const long j = k % steps;
    step(x, phase_at(period, j, steps), h, params, w);
    if ((k + 1) % stride == 0) {
      out.tau.push_back(phase_at(period, j + 1, steps));
      out.points.push_back(x);
    }
  }
  return out;
}

double fold(double z) {
  double f = std::fmod(z + kPi / 2.0, kPi);
  if (f < 0.0) f += kPi;
  if (f >= kPi) f -= kPi;
  return f - kPi / 2.0;
}

PoincareSection poincare(const std::vector<PhasePoint>& seeds, const ClassicalParams& params, int n_periods,
                         unsigned threads) {
  validate(params);
  if (n_periods < 1) fail(ErrorKind::InvalidInput, "n_periods must be positive");
  PoincareSection out;
  out.trajectories = static_cast<int>(seeds.size());
  out.periods = n_periods;
  out.samples.resize(seeds.size() * static_cast<std::size_t>(n_periods));
  parallel_for(seeds.size(), threads, [&](std::size_t s) {
    const Trajectory t = integrate(seeds[s], params, n_periods);
    for (int m = 1; m <= n_periods; ++m) {
      const PhasePoint& x = t.points[static_cast<std::size_t>(m)];
      out.samples[s * n_periods + (m - 1)] = {static_cast<int>(s), m, fold(x.z), x.p};
    }
  });
  return out;
}

std::vector<PhasePoint> seed_grid(int nz, int np, double kappa) {
  if (nz < 1 || np < 1) fail(ErrorKind::InvalidInput, "seed grid needs at least one point per axis");
  if (!(kappa > 0.0)) fail(ErrorKind::InvalidInput, "seed grid needs kappa > 0");
  const double pmax = std::sqrt(2.0 * kappa);
  std::vector<PhasePoint> seeds;
  seeds.reserve(static_cast<std::size_t>(nz) * np);
  for (int i = 0; i < nz; ++i) {
    const double z = kPi * (i + 0.5) / nz;
    for (int j = 0; j < np; ++j) {
      const double p = -pmax + 2.0 * pmax * (j + 0.5) / np;
      seeds.push_back({z, p});
    }
  }
  return seeds;
}

double orbit_frequency(const PhasePoint& initial, const ClassicalParams& params, int min_periods) {
  validate(params);
  if (params.lambda != 0.0) fail(ErrorKind::InvalidInput, "orbit_frequency requires lambda = 0");
  if (min_periods < 2) fail(ErrorKind::InvalidInput, "need at least two orbit periods");
  const double e = energy(initial, params.kappa);
  if (!(e < separatrix_energy(params.kappa))) {
    fail(ErrorKind::Regime, "orbit is not librating (energy at or above the separatrix)");
  }
  const double centre = well_centre(initial.z);
  const double h = params.dt();
  const auto w = weights(params.order);

  // Cap: a small-amplitude orbit has period π/√(2κ)·2; near the separatrix
  // the period grows logarithmically, so allow a generous step budget.
  const long max_steps = 200'000'000L;
  PhasePoint x = initial;
  double t = 0.0;
  double first = -1.0, last = -1.0;
  int crossings = 0;
  for (long k = 0; k < max_steps && crossings <= min_periods; ++k) {
    const PhasePoint prev = x;
    step(x, t, h, params, w);
    const double y0 = prev.z - centre, y1 = x.z - centre;
    if (y0 < 0.0 && y1 >= 0.0) {
      // Cubic Hermite root of y(s) on [0, h] using z' = p at both ends.
      auto hermite = [&](double s) {
        const double u = s / h;
        const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
        const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
        return h00 * y0 + h10 * h * prev.p + h01 * y1 + h11 * h * x.p;
      };
      double lo = 0.0, hi = h;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (hermite(mid) < 0.0 ? lo : hi) = mid;
      }
      const double tc = t + 0.5 * (lo + hi);
      if (crossings == 0) first = tc;
      last = tc;
      ++crossings;
    }
    t += h;
  }
  if (crossings <= min_periods) fail(ErrorKind::Regime, "orbit did not complete enough librations");
  return kTwoPi * (crossings - 1) / (last - first);
}

double resonance_energy(const ClassicalParams& params, double target, double tol) {
  ClassicalParams p = params;
  p.lambda = 0.0;
  const double half = 0.5 * p.kappa;
  if (!(half > 0.0)) fail(ErrorKind::InvalidInput, "resonance search needs kappa > 0");
  auto omega_at = [&](double e) {
    const PhasePoint x{kPi / 2.0, std::sqrt(2.0 * (e + half))};
    return orbit_frequency(x, p, 50);
  };
  // ω decreases monotonically from √(2κ) at the bottom to 0 at the separatrix.
  if (!(target < std::sqrt(2.0 * p.kappa))) fail(ErrorKind::Regime, "target frequency above the small-orbit limit");
  double lo = -half + 1e-9 * half, hi = half - 1e-9 * half;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (omega_at(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PhasePoint stroboscopic_map(const PhasePoint& x, const ClassicalParams& params) {
  return advance(x, 0.0, params.steps_per_period, params, 1);
}

FixedPoint find_fixed_point(const PhasePoint& guess, const ClassicalParams& params, double tol, int max_iter) {
  validate(params);
  constexpr double fd = 1e-6;
  FixedPoint out;
  PhasePoint x{kPi / 2.0 + fold(guess.z - kPi / 2.0), guess.p};
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
  auto jacobian = [&](const PhasePoint& at) {
    const PhasePoint zp = stroboscopic_map({at.z + fd, at.p}, params);
    const PhasePoint zm = stroboscopic_map({at.z - fd, at.p}, params);
    const PhasePoint pp = stroboscopic_map({at.z, at.p + fd}, params);
    const PhasePoint pm = stroboscopic_map({at.z, at.p - fd}, params);
    j00 = (zp.z - zm.z) / (2 * fd);
    j10 = (zp.p - zm.p) / (2 * fd);
    j01 = (pp.z - pm.z) / (2 * fd);
    j11 = (pp.p - pm.p) / (2 * fd);
  };
  for (int it = 1; it <= max_iter; ++it) {
    const PhasePoint y = stroboscopic_map(x, params);
    const double fz = y.z - x.z, fp = y.p - x.p;
    out.residual = std::hypot(fz, fp);
    out.iterations = it;
    if (!std::isfinite(out.residual)) break;
    if (out.residual < tol) break;
    jacobian(x);
    // Solve (J - I) δ = -f.
    const double a = j00 - 1.0, b = j01, c = j10, d = j11 - 1.0;
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-14) fail(ErrorKind::Singular, "stroboscopic Jacobian minus identity is singular");
    double dz = (-fz * d + fp * b) / det;
    double dp = (-a * fp + c * fz) / det;
    const double len = std::hypot(dz, dp);
    if (len > kMaxNewtonStep) {
      dz *= kMaxNewtonStep / len;
      dp *= kMaxNewtonStep / len;
    }
    x.z = kPi / 2.0 + fold(x.z + dz - kPi / 2.0);
    x.p += dp;
  }
  const PhasePoint y = stroboscopic_map(x, params);
  out.residual = std::hypot(y.z - x.z, y.p - x.p);
  jacobian(x);
  out.x = x;
  out.trace = j00 + j11;
  if (!(out.residual < 1e-6)) fail(ErrorKind::Convergence, "Newton iteration on the stroboscopic map did not converge");
  return out;
}

FixedPoint resonance_fixed_point(const ClassicalParams& params) {
  validate(params);
  const double e = resonance_energy(params, 1.0, 1e-6);
  const double half = 0.5 * params.kappa;
  ClassicalParams free = params;
  free.lambda = 0.0;
  const Trajectory orbit = integrate({kPi / 2.0, std::sqrt(2.0 * (e + half))}, free, 1, params.steps_per_period / 32);

  std::vector<PhasePoint> guesses{{kPi / 2.0, 0.0}};
  guesses.insert(guesses.end(), orbit.points.begin(), orbit.points.end());

  bool found = false;
  FixedPoint best;
  double best_distance = -1.0;
  for (const PhasePoint& guess : guesses) {
    try {
      const FixedPoint fp = find_fixed_point(guess, params);
      if (!fp.stable()) continue;
      const double distance = std::hypot(fp.x.z - well_centre(fp.x.z), fp.x.p);
      if (distance > best_distance) {
        best = fp;
        best_distance = distance;
        found = true;
      }
    } catch (const Error&) {
    }
  }
  if (!found) fail(ErrorKind::Convergence, "no stable period-1 point found near the 1:1 resonance");
  return best;
}

double bounded_libration_fraction(const std::vector<PhasePoint>& seeds, const ClassicalParams& params, int n_periods,
                                  unsigned threads) {
  validate(params);
  if (seeds.empty()) fail(ErrorKind::InvalidInput, "no seeds");
  std::vector<char> bounded(seeds.size(), 0);
  const int steps = params.steps_per_period;
  const double h = params.dt();
  const auto w = weights(params.order);
  parallel_for(seeds.size(), threads, [&](std::size_t s) {
    PhasePoint x = seeds[s];
    const double centre = well_centre(x.z);
    for (long period = 0; period < n_periods; ++period) {
      for (long j = 0; j < steps; ++j) {
        step(x, phase_at(period, j, steps), h, params, w);
        if (std::abs(x.z - centre) > kPi / 2.0) return;
      }
    }
    bounded[s] = 1;
  });
  long count = 0;
  for (char b : bounded) count += b;
  return static_cast<double>(count) / static_cast<double>(seeds.size());
}

double finite_time_divergence(const PhasePoint& seed, const ClassicalParams& params, int n_periods, double eps) {
  validate(params);
  if (n_periods < 1) fail(ErrorKind::InvalidInput, "n_periods must be positive");
  PhasePoint a = seed;
  PhasePoint b{seed.z + eps, seed.p};
  double log_sum = 0.0;
  for (int m = 0; m < n_periods; ++m) {
    a = advance(a, kTwoPi * m, params.steps_per_period, params, 1);
    b = advance(b, kTwoPi * m, params.steps_per_period, params, 1);
    const double dz = b.z - a.z, dp = b.p - a.p;
    const double d = std::hypot(dz, dp);
    if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
    log_sum += std::log(d / eps);
    b = {a.z + dz * eps / d, a.p + dp * eps / d};
  }
  return log_sum / (kTwoPi * n_periods);
}

}  // namespace latrev::classical
