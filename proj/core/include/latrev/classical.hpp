#pragma once

#include <vector>

namespace latrev::classical {

// H = p²/2 + (κ/2)cos 2z + λ z sin τ. Wells are centred at z = π/2 + mπ.
struct ClassicalParams {
  double kappa = 2.0;
  double lambda = 0.0;
  int steps_per_period = 1000;  // dt = 2π / steps_per_period
  // 2: one kick-drift-kick step. 6: symmetric composition of seven such
  // steps, which keeps stroboscopic sampling exact and reaches energy
  // conservation well below 1e-8 at the default dt.
  int order = 6;

  double dt() const;
};

void validate(const ClassicalParams& params);

struct PhasePoint {
  double z = 0.0;
  double p = 0.0;
};

double energy(const PhasePoint& x, double kappa);

// Separatrix energy κ/2; librating orbits have E < κ/2.
inline double separatrix_energy(double kappa) { return 0.5 * kappa; }

// Advances `steps` steps of size ±dt starting at phase τ. A negative
// direction integrates backwards from τ.
PhasePoint advance(PhasePoint x, double tau, long steps, const ClassicalParams& params, int direction = 1);

struct Trajectory {
  std::vector<double> tau;
  std::vector<PhasePoint> points;
};

// Samples the trajectory every `stride` steps, starting with the initial
// point at τ = 0. stride <= 0 means once per drive period.
Trajectory integrate(const PhasePoint& initial, const ClassicalParams& params, int n_periods, int stride = 0);

// z folded into [-π/2, π/2) by π-periodicity.
double fold(double z);

struct PoincareSample {
  int seed_id = 0;
  int period_index = 0;  // m, sample taken at τ = 2πm
  double z = 0.0;        // folded
  double p = 0.0;
};

struct PoincareSection {
  std::vector<PoincareSample> samples;  // ordered by seed, then period
  int trajectories = 0;
  int periods = 0;
};

PoincareSection poincare(const std::vector<PhasePoint>& seeds, const ClassicalParams& params, int n_periods,
                         unsigned threads = 0);

// nz × np seeds filling the well z ∈ (0, π), |p| < √(2κ).
std::vector<PhasePoint> seed_grid(int nz, int np, double kappa);

// Undriven orbit frequency from the mean interval between upward crossings
// of the well centre over at least `min_periods` orbits.
double orbit_frequency(const PhasePoint& initial, const ClassicalParams& params, int min_periods = 50);

// Energy of the librating orbit whose frequency equals `target`, found by
// bisection over (-κ/2, κ/2).
double resonance_energy(const ClassicalParams& params, double target = 1.0, double tol = 1e-6);

struct FixedPoint {
  PhasePoint x;
  double residual = 0.0;  // |P(x) - x| after the last Newton step
  int iterations = 0;
  double trace = 0.0;     // of the stroboscopic Jacobian
  bool stable() const { return trace > -2.0 && trace < 2.0; }
};

// One drive period of the stroboscopic map from τ = 0.
PhasePoint stroboscopic_map(const PhasePoint& x, const ClassicalParams& params);

// Newton iteration on P(x) - x with a central-difference Jacobian.
FixedPoint find_fixed_point(const PhasePoint& guess, const ClassicalParams& params, double tol = 1e-10,
                            int max_iter = 50);

// Stable period-1 point of the stroboscopic map, i.e. an orbit locked 1:1
// to the drive. Newton is started from the well bottom and from points of
// the undriven orbit with frequency 1; the stable solution farthest from the
// well bottom is kept. When the frequency-1 torus has dissolved into the
// separatrix layer this is the driven continuation of the well bottom.
FixedPoint resonance_fixed_point(const ClassicalParams& params);

// Fraction of seeds that stay inside their initial well for n_periods.
double bounded_libration_fraction(const std::vector<PhasePoint>& seeds, const ClassicalParams& params, int n_periods,
                                  unsigned threads = 0);

// ln(d(T)/d(0))/T for two seeds separated by eps in z.
double finite_time_divergence(const PhasePoint& seed, const ClassicalParams& params, int n_periods,
                              double eps = 1e-8);

}  // namespace latrev::classical
