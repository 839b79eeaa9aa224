#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "latrev/error.hpp"
#include "latrev/mathieu.hpp"
#include "latrev/resonance.hpp"

using namespace latrev;
using namespace latrev::resonance;

namespace {

constexpr double kPi = 3.14159265358979323846;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Assertion;
}

ResonanceContext manual(double q, double beta, double zeta, double kbar, int l = 0) {
  ResonanceContext c;
  c.N = 1;
  c.q = q;
  c.beta = beta;
  c.zeta = zeta;
  c.kbar = kbar;
  c.l = l;
  c.omega = 1.0 + beta * zeta * kbar;
  return c;
}

// Direct evaluations of the closed forms, written out independently.
double deep_t_cl(int nbar, double q0) {
  const double s = 2 * nbar + 1;
  return kPi / (2 * std::sqrt(q0)) * (1 + s / (8 * std::sqrt(q0)) + 3 * (s * s + 1) / (256 * q0));
}

double robust_t_cl(double q, double x, double kbar, double zeta) {
  return 2 * kPi / (kbar * zeta * (std::sqrt(q) - (4 * x + 1) / 8));
}

}  // namespace

TEST_CASE("classical frequency") {
  CHECK(classical_frequency(2, 0.5, Regime::Shallow) == doctest::Approx(4.0 * (1.0 - 0.25 / 18.0)).epsilon(1e-14));
  CHECK(classical_frequency(2, 0.5, Regime::Shallow) == doctest::Approx(3.9444).epsilon(1e-4));
  for (int n : {2, 3, 5}) CHECK(classical_frequency(n, 0.0, Regime::Shallow) == doctest::Approx(2.0 * n));
  CHECK(classical_frequency(0, 4.0, Regime::Deep) == doctest::Approx(7.5).epsilon(1e-15));
  CHECK(kind_of([] { classical_frequency(1, 0.5, Regime::Shallow); }) == ErrorKind::Singular);
}

TEST_CASE("nonlinearity") {
  CHECK(nonlinearity(3, 0.0, Regime::Shallow) == doctest::Approx(2.0));
  CHECK(nonlinearity(0, 4.0, Regime::Deep) == doctest::Approx(1.09375).epsilon(1e-15));
  CHECK(nonlinearity(2, 0.5, Regime::Shallow) == doctest::Approx(2.0 + 0.25 * 13.0 / 54.0).epsilon(1e-14));
  CHECK(nonlinearity(2, 0.5, Regime::Shallow) == doctest::Approx(2.0602).epsilon(1e-4));
  CHECK(kind_of([] { nonlinearity(0, 0.5, Regime::Shallow); }) == ErrorKind::Singular);
}

TEST_CASE("matrix element") {
  CHECK(matrix_element(0, 4.0, 0.5, ElementMethod::Harmonic) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(matrix_element(3, 16.0, 0.5, ElementMethod::Harmonic) == doctest::Approx(1.0).epsilon(1e-15));
  const double deep = 400.0;
  CHECK(matrix_element(0, deep, 0.5, ElementMethod::Numeric) ==
        doctest::Approx(matrix_element(0, deep, 0.5, ElementMethod::Harmonic)).epsilon(0.02));
}

TEST_CASE("context construction") {
  const ResonanceContext still = build_context(ScaledParams::from_effective_depth(0.5, 16.0, 0.0));
  CHECK(still.q == 0.0);
  CHECK(still.regime == Regime::Deep);

  const ResonanceContext c = build_context(ScaledParams::from_effective_depth(0.5, 16.0, 0.5));
  CHECK(c.omega == doctest::Approx(7.5));
  CHECK(c.zeta == doctest::Approx(1.09375));
  CHECK(c.beta0 == doctest::Approx(0.25 * 1.09375 / (4.0 * c.matrix_element_V)).epsilon(1e-14));
  CHECK(c.beta == doctest::Approx(6.5 / (1.09375 * 0.5)).epsilon(1e-14));
  CHECK(c.q == doctest::Approx(0.5 / c.beta0).epsilon(1e-14));
}

TEST_CASE("exact resonance gives beta = 0") {
  ContextOptions opt;
  opt.regime = Regime::Deep;
  const ResonanceContext c = build_context(ScaledParams::from_effective_depth(0.5, 4.0 * 0.140625, 0.1), opt);
  CHECK(c.omega == 1.0);
  CHECK(c.beta == 0.0);
}

TEST_CASE("shallow context at V' = 2") {
  ContextOptions opt;
  opt.nbar = 2;
  opt.regime = Regime::Shallow;
  const ResonanceContext c = build_context(ScaledParams::from_effective_depth(0.5, 2.0, 0.1), opt);
  CHECK(c.beta0 == doctest::Approx(0.0625).epsilon(0.01));
}

TEST_CASE("undriven time scales") {
  const TimeScales deep = undriven_times(0, 4.0, Regime::Deep);
  CHECK(deep.t_classical == doctest::Approx(deep_t_cl(0, 4.0)).epsilon(1e-14));
  CHECK(deep.t_classical == doctest::Approx(0.8391).epsilon(1e-4));
  CHECK(deep.t_revival == doctest::Approx(4.0 * kPi * 0.953125).epsilon(1e-14));
  CHECK(deep.t_revival == doctest::Approx(11.9773).epsilon(1e-5));
  CHECK(deep.t_super_revival == doctest::Approx(64.0 * kPi).epsilon(1e-14));
  CHECK(deep.unit == TimeUnit::Recoil);

  CHECK(undriven_times(2, 1e-6, Regime::Shallow).t_revival == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  CHECK(undriven_times(2, 0.5, Regime::Shallow).t_classical == doctest::Approx(1.013889 * kPi / 2.0).epsilon(1e-6));
  CHECK(undriven_times(2, 0.5, Regime::Shallow).t_classical == doctest::Approx(1.5926).epsilon(1e-4));

  const TimeScales unbounded = undriven_times(2, 0.0, Regime::Shallow);
  CHECK(std::isinf(unbounded.t_super_revival));
  CHECK_FALSE(unbounded.validity_warnings.empty());
}

TEST_CASE("drive-unit conversion") {
  const TimeScales deep = to_drive_units(undriven_times(0, 4.0, Regime::Deep), 0.5);
  CHECK(deep.unit == TimeUnit::Drive);
  CHECK(deep.t_revival == doctest::Approx(16.0 * kPi * 0.953125).epsilon(1e-6));

  TimeScales mixed;
  mixed.t_classical = 1.0;
  mixed.t_revival = 2.0;
  mixed.t_super_revival = 3.0;
  mixed.unit = TimeUnit::Mixed;
  const TimeScales d = to_drive_units(mixed, 0.25);
  CHECK(d.t_classical == 8.0);
  CHECK(d.t_revival == 16.0);
  CHECK(d.t_super_revival == 3.0);
}

TEST_CASE("weak-drive formulas") {
  const TimeScales t0 = undriven_times(0, 4.0, Regime::Deep);
  const ResonanceContext zero = manual(0.0, 0.1, 1.0, 0.5);
  const TimeScales z = delicate_times(zero, t0);
  const double delta = 1.0 / (1.0 - 1.0 / zero.omega);
  CHECK(z.t_classical == doctest::Approx(t0.t_classical * delta).epsilon(1e-14));
  CHECK(z.t_revival == t0.t_revival);

  const ResonanceContext c = manual(0.5, 0.1, 2.0, 0.5);
  const TimeScales t = delicate_times(c, t0);
  const double D = 4.0 * 0.01 - 1.0;
  const double bracket = 1.0 + 0.125 / (D * D);
  CHECK(t.t_classical / (t0.t_classical / (1.0 - 1.0 / c.omega)) == doctest::Approx(bracket).epsilon(1e-13));
  CHECK(bracket == doctest::Approx(1.1356).epsilon(1e-4));
  const double spr = kPi * std::pow(D, 4) / (2.0 * 2.0 * 0.5 * 0.25 * 0.1 * 1.04);
  CHECK(t.t_super_revival == doctest::Approx(spr).epsilon(1e-13));
  CHECK(t.t_revival == doctest::Approx(t0.t_revival * (1.0 - 0.125 * 1.12 / (D * D * D))).epsilon(1e-13));
}

TEST_CASE("weak-drive errors and warnings") {
  const TimeScales t0 = undriven_times(0, 4.0, Regime::Deep);
  CHECK(kind_of([&] { delicate_times(manual(0.3, 0.5, 1.0, 0.5), t0); }) == ErrorKind::Singular);
  CHECK(kind_of([&] { delicate_times(manual(0.3, 0.0, 1.0, 0.5), t0); }) == ErrorKind::Singular);
  ResonanceContext r = manual(0.3, 0.2, 1.0, 0.5);
  r.omega = 1.0;
  CHECK(kind_of([&] { delicate_times(r, t0); }) == ErrorKind::Singular);
  CHECK_FALSE(delicate_times(manual(1.5, 0.1, 1.0, 0.5), t0).validity_warnings.empty());
}

TEST_CASE("strong-drive formulas") {
  const TimeScales t = robust_times(manual(4.0, 0.1, 1.0, 0.5));
  CHECK(t.t_classical == doctest::Approx(robust_t_cl(4.0, 0.1, 0.5, 1.0)).epsilon(1e-14));
  CHECK(t.t_classical == doctest::Approx(6.885).epsilon(1e-3));
  CHECK(t.t_super_revival == doctest::Approx(128.0 * kPi).epsilon(1e-14));
  CHECK_FALSE(t.validity_warnings.empty());

  const TimeScales far = robust_times(manual(1e12, 0.1, 1.0, 0.5));
  CHECK(far.t_classical < 1e-4);
  CHECK(far.t_super_revival > 1e7);

  CHECK(kind_of([] { robust_times(manual(0.01, 0.1, 1.0, 0.5)); }) == ErrorKind::Regime);
}

TEST_CASE("harmonic strong-drive formulas") {
  const ResonanceContext c = manual(0.0, 0.1, 1.0, 0.5);
  const TimeScales t = robust_times_harmonic(c, 4.0, 1.0);
  CHECK(t.t_super_revival == doctest::Approx(64.0 * kPi / (0.25 * std::pow(4.0, 0.125))).epsilon(1e-14));
  CHECK(t.t_super_revival == doctest::Approx(676.2).epsilon(1e-3));
  CHECK(robust_times_harmonic(c, 4.0, 1e14).t_revival == doctest::Approx(8.0 * kPi / 0.5).epsilon(1e-6));
  CHECK(kind_of([&] { robust_times_harmonic(c, 4.0, 1e-8); }) == ErrorKind::Regime);
  CHECK(kind_of([&] { robust_times_harmonic(c, 4.0, 0.0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("harmonic substitution reproduces the strong-drive triple") {
  for (double lambda : {0.5, 3.0, 40.0}) {
    for (double q0 : {4.0, 9.0, 25.0}) {
      ResonanceContext c = manual(0.0, 0.13, nonlinearity(0, q0, Regime::Deep), 0.5);
      c.q = harmonic_q(0, q0, c.kbar, c.zeta, lambda);
      const double expected = 4.0 * lambda / (std::pow(q0, 0.25) * 0.25 * c.zeta);
      CHECK(c.q == doctest::Approx(expected).epsilon(1e-14));
      const TimeScales a = robust_times(c);
      const TimeScales b = robust_times_harmonic(c, q0, lambda);
      CHECK(a.t_classical == doctest::Approx(b.t_classical).epsilon(1e-12));
      CHECK(a.t_revival == doctest::Approx(b.t_revival).epsilon(1e-12));
      CHECK(a.t_super_revival == doctest::Approx(b.t_super_revival).epsilon(1e-12));
    }
  }
}

TEST_CASE("time-scale trends over lambda") {
  const TimeScales t0 = undriven_times(0, 4.0, Regime::Deep);
  double prev_cl = 0.0;
  for (double q = 0.05; q <= 1.0; q += 0.05) {
    const double t = delicate_times(manual(q, 0.2, 1.0, 0.5), t0).t_classical;
    CHECK(t > prev_cl);
    prev_cl = t;
  }
  double prev_rob = 1e300, prev_spr = 0.0;
  for (double q = 5.0; q <= 200.0; q += 5.0) {
    const TimeScales t = robust_times(manual(q, 0.2, 1.0, 0.5));
    CHECK(t.t_classical < prev_rob);
    CHECK(t.t_super_revival > prev_spr);
    prev_rob = t.t_classical;
    prev_spr = t.t_super_revival;
  }
}

TEST_CASE("formula selection") {
  CHECK(parse_formula("robust-harmonic") == Formula::RobustHarmonic);
  CHECK(kind_of([] { parse_formula("fast"); }) == ErrorKind::Validation);
  const ResonanceContext still = build_context(ScaledParams::from_effective_depth(0.5, 16.0, 0.0));
  CHECK(evaluate(still, Formula::Auto).regime_tag == TimeTag::Undriven);
  CHECK(evaluate(still, Formula::Auto).t_revival == doctest::Approx(16.0 * kPi * 0.953125).epsilon(1e-6));
  const ResonanceContext weak = build_context(ScaledParams::from_effective_depth(0.5, 16.0, 0.02));
  CHECK(evaluate(weak, Formula::Auto).regime_tag == TimeTag::Delicate);
  CHECK(evaluate(weak, Formula::Auto).unit == TimeUnit::Drive);
}

TEST_CASE("quasi-energies at zero modulation") {
  const ResonanceContext c = manual(0.0, 0.1, 1.3, 0.5);
  const std::vector<int> ls{-2, -1, 0, 1, 2};
  const std::vector<double> nus = resonance_orders(c, ls);
  const std::vector<QuasiEnergy> e = quasienergy_spectrum(c, {0}, nus);
  REQUIRE(e.size() == ls.size());
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const double x = ls[i] + 0.1;
    const double expected = std::fmod(0.25 * 1.3 / 8.0 * 4.0 * x * x, 0.5);
    CHECK(e[i].energy == doctest::Approx(expected).epsilon(1e-13));
    CHECK(e[i].energy >= 0.0);
    CHECK(e[i].energy < 0.5);
    CHECK(e[i].j == 0);
  }
  CHECK(kind_of([&] { quasienergy_spectrum(c, {1}, nus); }) == ErrorKind::InvalidInput);
}

TEST_CASE("quasi-energy level spacing at large modulation") {
  const ResonanceContext c = manual(25.0, 0.1, 1.0, 0.5);
  const std::vector<double> nus = resonance_orders(c, {-2, -1, 0, 1, 2});
  std::vector<double> levels;
  for (const QuasiEnergy& e : quasienergy_spectrum(c, {0}, nus)) levels.push_back(e.unreduced);
  std::sort(levels.begin(), levels.end());
  const double scale = 0.25 / 8.0;
  // Adjacent large-q levels differ by 4√q − (s+1)/2 for s = 1, 3, 5, 7.
  for (int i = 0; i < 4; ++i) {
    const double s = 2 * i + 1;
    const double spacing = (levels[i + 1] - levels[i]) / scale;
    CAPTURE(i);
    CHECK(spacing == doctest::Approx(20.0 - 0.5 * (s + 1)).epsilon(0.1));
  }
  const double s01 = levels[1] - levels[0];
  const double s12 = levels[2] - levels[1];
  CHECK(std::abs(s01 - s12) / s01 < 0.07);
}
