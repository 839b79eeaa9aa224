// Acceptance checks for the primary component. Each criterion prints one
// PASS/FAIL line; tolerances and time limits are fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latrev/analysis.hpp"
#include "latrev/classical.hpp"
#include "latrev/error.hpp"
#include "latrev/mathieu.hpp"
#include "latrev/quantum.hpp"
#include "latrev/resonance.hpp"
#include "latrev/units.hpp"
#include "oracles/direct_propagator.hpp"
#include "oracles/hill.hpp"

using namespace latrev;

namespace {

constexpr double kPi = constants::kPi;
constexpr double kPlanck = 6.62607015e-34;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// 1 ---------------------------------------------------------------------------

Outcome units_check() {
  constexpr double kTol = 0.05;
  PhysicalSetup s;
  s.lattice_depth = 16.0;
  s.drive_frequency = 9e3;
  const double lo = scale_setup(s).kbar;
  s.drive_frequency = 3e3;
  const double hi = scale_setup(s).kbar;
  const double e_lo = rel(0.668, lo);
  const double e_hi = rel(2.066, hi);
  std::ostringstream os;
  os << "kbar(9 kHz) = " << fmt(lo) << " vs 0.668 (rel " << fmt(e_lo, 3) << ", measured against 0.668: "
     << fmt(rel(lo, 0.668), 3) << "); kbar(3 kHz) = " << fmt(hi) << " vs 2.066 (rel " << fmt(e_hi, 3)
     << "); tol " << kTol;
  return {e_lo < kTol && e_hi < kTol, os.str()};
}

// 2 ---------------------------------------------------------------------------

Outcome band_check() {
  constexpr double kTol = 0.15;
  PhysicalSetup s;
  const double er_khz = s.recoil_energy() / kPlanck / 1e3;
  const mathieu::BandEdgeGaps shallow = mathieu::band_edge_gaps(0.5);
  const mathieu::BandEdgeGaps deep = mathieu::band_edge_gaps(4.0);
  const double f_shallow = shallow.at_zone_edge * er_khz;
  const double f_deep = deep.at_zone_edge * er_khz;
  const double e1 = rel(f_shallow, 3.15);
  const double e2 = rel(f_deep, 20.784);
  std::ostringstream os;
  os << "zone-edge gap V'=2: " << fmt(f_shallow, 5) << " kHz vs 3.15 (rel " << fmt(e1, 3) << "), V'=16: "
     << fmt(f_deep, 5) << " kHz vs 20.784 (rel " << fmt(e2, 3) << "); kappa-average "
     << fmt(shallow.kappa_average * er_khz, 5) << " / " << fmt(deep.kappa_average * er_khz, 5)
     << " kHz; E_r/h = " << fmt(er_khz, 5) << " kHz; tol " << kTol;
  return {e1 < kTol && e2 < kTol, os.str()};
}

// 3 ---------------------------------------------------------------------------

Outcome mathieu_check() {
  constexpr double kOracleTol = 1e-10;
  constexpr double kExponentTol = 0.15;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  int exact = 0;
  for (int i = 0; i < 50; ++i) {
    const double nu = u(rng);
    exact += mathieu::char_value(nu, 0.0) == nu * nu;
  }

  const double a01 = mathieu::char_value(0.0, 1.0);
  const double oracle = oracle::lowest(0.0, 1.0, 128);
  const double richardson = std::abs(oracle - oracle::lowest(0.0, 1.0, 256));
  const double diff = std::abs(a01 - oracle);

  // Small q: the first omitted term is O(q⁴).
  const double nu = 2.5;
  auto small_err = [&](double q) { return std::abs(mathieu::char_value(nu, q) - mathieu::char_value_small_q(nu, q)); };
  const double p_small = std::log(small_err(0.2) / small_err(0.1)) / std::log(2.0);
  // Large q: the first omitted term is O(q^{-1/2}).
  auto large_err = [](double q) { return std::abs(mathieu::char_value(0.0, q) - mathieu::char_value_large_q(1, q)); };
  const double p_large = -std::log(large_err(400.0) / large_err(1600.0)) / std::log(4.0);

  const bool ok = exact == 50 && diff < kOracleTol && std::abs(p_small - 4.0) <= kExponentTol * 4.0 &&
                  std::abs(p_large + 0.5) <= kExponentTol * 0.5;
  std::ostringstream os;
  os << exact << "/50 exact at q=0; a0(1) = " << fmt(a01, 12) << ", oracle diff " << fmt(diff, 3)
     << " (oracle 128 vs 256: " << fmt(richardson, 3) << "); small-q exponent " << fmt(p_small, 4)
     << " (4), large-q exponent " << fmt(p_large, 4) << " (-0.5)";
  return {ok, os.str()};
}

// 4 ---------------------------------------------------------------------------

Outcome undriven_revival_check() {
  constexpr double kTol = 0.05;
  const double kbar = 0.5, q0 = 4.0;
  const ScaledParams p = ScaledParams::from_effective_depth(kbar, 4.0 * q0, 0.0);
  const quantum::Grid g{32 * kPi, 2048};
  const resonance::TimeScales t = resonance::to_drive_units(resonance::undriven_times(0, q0, resonance::Regime::Deep), kbar);
  const int periods = static_cast<int>(std::ceil(1.6 * t.t_revival / (2 * kPi)));
  quantum::EvolveOptions o;
  o.tau_end = periods * 2 * kPi;
  o.dt = 2 * kPi / 1000;
  const quantum::Wavefunction w = quantum::init_gaussian(g, kPi / 2, 0.0, quantum::ground_well_delta_p(kbar, q0), kbar);
  const AutocorrelationSeries s = quantum::autocorrelation(quantum::evolve(g, w, p, o));

  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  std::ostringstream os;
  os << "T_rev analytic " << fmt(t.t_revival, 5) << " (drive units), " << periods << " periods simulated, |A|^2 in ["
     << fmt(*lo, 4) << ", " << fmt(*hi, 4) << "]; ";
  try {
    const analysis::EnvelopeEstimate e = analysis::extract_revival_time(s, t.t_classical);
    const double err = rel(e.time, t.t_revival);
    os << "extracted " << fmt(e.time, 5) << ", rel " << fmt(err, 3) << ", tol " << kTol;
    return {err < kTol, os.str()};
  } catch (const Error& e) {
    os << "extraction failed: " << e.what();
    return {false, os.str()};
  }
}

// 5 ---------------------------------------------------------------------------

struct DrivenCase {
  const char* name;
  double lambda;
  bool want_super;
};

Outcome driven_check() {
  constexpr double kTolCl = 0.10, kTolRev = 0.10, kTolSpr = 0.20;
  constexpr int kPeriods = 200;
  const double kbar = 0.5;
  const quantum::Grid g{32 * kPi, 2048};
  bool ok = true;
  std::ostringstream os;
  for (const DrivenCase c : {DrivenCase{"fig5", 0.5, false}, DrivenCase{"fig6", 1.5, true}}) {
    const ScaledParams p = ScaledParams::from_effective_depth(kbar, 16.0, c.lambda);
    const resonance::ResonanceContext ctx = resonance::build_context(p);
    os << c.name << " (lambda " << c.lambda << ", q " << fmt(ctx.q, 4) << ", beta " << fmt(ctx.beta, 4) << "): ";

    quantum::EvolveOptions o;
    o.tau_end = kPeriods * 2 * kPi;
    o.dt = 2 * kPi / 1000;
    const quantum::Wavefunction w = quantum::init_gaussian(g, kPi / 2, 0.0, 0.5, kbar);
    const AutocorrelationSeries s = quantum::autocorrelation(quantum::evolve(g, w, p, o));
    try {
      const double period = analysis::extract_classical_period(s).period;
      os << "simulated T_cl " << fmt(period, 5) << "; ";
    } catch (const Error& e) {
      os << "simulated T_cl unavailable (" << e.what() << "); ";
    }

    std::optional<resonance::TimeScales> t;
    try {
      t = resonance::robust_times(ctx);
    } catch (const Error& e) {
      os << "strong-drive expression unavailable: " << e.what() << ". ";
      ok = false;
      continue;
    }
    const analysis::RecurrenceReport r = analysis::compare(s, *t, c.want_super);
    auto judge = [&](const char* what, const std::optional<double>& err, double tol) {
      if (!err) {
        os << what << " not extracted; ";
        ok = false;
        return;
      }
      os << what << " rel " << fmt(*err, 3) << " (tol " << tol << "); ";
      ok = ok && *err < tol;
    };
    judge("T_cl", r.err_classical, kTolCl);
    judge("T_rev", r.err_revival, kTolRev);
    if (c.want_super) judge("T_spr", r.err_super_revival, kTolSpr);
  }
  return {ok, os.str()};
}

// 6 ---------------------------------------------------------------------------

Outcome trend_check() {
  struct Lattice {
    const char* name;
    double vprime;
    int nbar;
    resonance::Regime regime;
  };
  bool ok = true;
  std::ostringstream os;
  for (const Lattice lat : {Lattice{"deep", 16.0, 0, resonance::Regime::Deep},
                            Lattice{"shallow", 2.0, 2, resonance::Regime::Shallow}}) {
    analysis::SweepOptions o;
    o.base = ScaledParams::from_effective_depth(0.5, lat.vprime, 0.0);
    o.context.nbar = lat.nbar;
    o.context.regime = lat.regime;
    o.threads = 1;
    const double beta0 = resonance::build_context(o.base, o.context).beta0;
    auto monotone = [&](const std::vector<analysis::SweepRow>& rows, auto pick, int sign) {
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto a = pick(rows[i - 1]);
        const auto b = pick(rows[i]);
        if (!a || !b || !(sign * (*b - *a) > 0.0)) return false;
      }
      return true;
    };
    auto field = [](const analysis::TimesCell analysis::SweepRow::*cell, double resonance::TimeScales::*f) {
      return [=](const analysis::SweepRow& r) -> std::optional<double> {
        const analysis::TimesCell& c = r.*cell;
        return c.times ? std::optional<double>((*c.times).*f) : std::nullopt;
      };
    };
    o.lambdas = analysis::parse_grid(fmt(0.05 * beta0, 17) + ":" + fmt(beta0, 17) + ":40");
    const auto weak = analysis::sweep(o);
    o.lambdas = analysis::parse_grid(fmt(40 * beta0, 17) + ":" + fmt(400 * beta0, 17) + ":40");
    const auto strong = analysis::sweep(o);
    using T = resonance::TimeScales;
    using R = analysis::SweepRow;
    const bool a = monotone(weak, field(&R::delicate, &T::t_classical), +1);
    const bool b = monotone(weak, field(&R::delicate, &T::t_revival), -1);
    const bool c = monotone(strong, field(&R::robust, &T::t_classical), -1);
    const bool d = monotone(strong, field(&R::robust, &T::t_super_revival), +1);
    os << lat.name << ": weak T_cl up " << (a ? "yes" : "no") << ", weak T_rev down " << (b ? "yes" : "no")
       << ", strong T_cl down " << (c ? "yes" : "no") << ", strong T_spr up " << (d ? "yes" : "no") << "; ";
    ok = ok && a && b && c && d;
  }
  return {ok, os.str()};
}

// 7 ---------------------------------------------------------------------------

Outcome poincare_check() {
  constexpr double kEnergyTol = 1e-8;
  constexpr int kPeriods = 300;
  bool ok = true;
  std::ostringstream os;
  for (double kappa : {2.0, 16.0}) {
    const std::vector<classical::PhasePoint> seeds = classical::seed_grid(5, 4, kappa);
    classical::ClassicalParams p;
    p.kappa = kappa;
    double worst = 0.0;
    for (const classical::PhasePoint& x0 : seeds) {
      const double e0 = classical::energy(x0, kappa);
      for (const classical::PhasePoint& x : classical::integrate(x0, p, kPeriods).points) {
        worst = std::max(worst, std::abs(classical::energy(x, kappa) - e0));
      }
    }
    p.lambda = 0.5;
    bool fixed = false;
    std::string fp_detail;
    try {
      const classical::FixedPoint fp = classical::resonance_fixed_point(p);
      fixed = fp.stable() && fp.residual < kEnergyTol;
      fp_detail = "(" + fmt(fp.x.z, 5) + ", " + fmt(fp.x.p, 5) + ") trace " + fmt(fp.trace, 4);
    } catch (const Error& e) {
      fp_detail = e.what();
    }
    const double f05 = classical::bounded_libration_fraction(seeds, p, kPeriods);
    p.lambda = 1.5;
    const double f15 = classical::bounded_libration_fraction(seeds, p, kPeriods);
    os << "kappa " << kappa << ": energy error " << fmt(worst, 3) << ", fixed point " << fp_detail
       << ", libration fraction " << f05 << " -> " << f15 << "; ";
    ok = ok && worst < kEnergyTol && fixed && f15 < f05;
  }
  return {ok, os.str()};
}

// 8 ---------------------------------------------------------------------------

double fidelity(const std::vector<quantum::cplx>& a, const std::vector<quantum::cplx>& b) {
  quantum::cplx s = 0.0;
  double na = 0.0, nb = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += std::conj(a[j]) * b[j];
    na += std::norm(a[j]);
    nb += std::norm(b[j]);
  }
  return std::norm(s) / (na * nb);
}

Outcome propagator_check() {
  constexpr double kNormTol = 1e-12, kDispersionTol = 1e-6, kFidelityTol = 1e-6;
  constexpr double kRatioLo = 3.5, kRatioHi = 4.5;
  const double kbar = 0.5;
  std::ostringstream os;

  // Norm over 10⁴ steps.
  const quantum::Grid box{8 * kPi, 512};
  const ScaledParams driven = ScaledParams::from_effective_depth(kbar, 16.0, 0.5);
  quantum::EvolveOptions o;
  o.tau_end = 10 * 2 * kPi;
  o.record_overlaps = false;
  const double drift =
      quantum::evolve(box, quantum::init_gaussian(box, kPi / 2, 0.0, 0.5, kbar), driven, o).max_norm_drift;

  // Free spreading.
  const quantum::Grid wide{32 * kPi, 2048};
  quantum::EvolveOptions f;
  f.dt = 0.01;
  f.tau_end = 12.0;
  f.snapshot_stride = 200;
  f.record_overlaps = false;
  const auto free_rec = quantum::evolve(wide, quantum::init_gaussian(wide, 0.0, 0.0, 0.5, kbar),
                                        ScaledParams::from_effective_depth(kbar, 0.0, 0.0), f);
  double worst_disp = 0.0;
  for (std::size_t i = 0; i < free_rec.densities.size(); ++i) {
    const std::vector<double>& rho = free_rec.densities[i];
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < wide.points; ++j) {
      m0 += rho[j];
      m1 += rho[j] * wide.z(j);
      m2 += rho[j] * wide.z(j) * wide.z(j);
    }
    const double var = m2 / m0 - (m1 / m0) * (m1 / m0);
    const double tau = free_rec.snapshot_times[i];
    const double expected = 0.25 * (1.0 + std::pow(kbar * tau / 0.5, 2));
    worst_disp = std::max(worst_disp, rel(var, expected));
  }

  // Gauge frame against the direct drive term on a four times larger box.
  // Shallower wells shed an unbound tail that leaves any finite box.
  const double q0 = 36.0, lambda = 0.3;
  const quantum::Grid gbox{16 * kPi, 1024};
  const int spp = 2000, periods = 10;
  const ScaledParams gp = ScaledParams::from_effective_depth(kbar, 4.0 * q0, lambda);
  const double dp = quantum::ground_well_delta_p(kbar, q0);
  quantum::EvolveOptions go;
  go.tau_end = periods * 2 * kPi;
  go.dt = 2 * kPi / spp;
  go.record_overlaps = false;
  const auto grec = quantum::evolve(gbox, quantum::init_gaussian(gbox, kPi / 2, 0.0, dp, kbar), gp, go);
  const std::vector<quantum::cplx> gauge = quantum::gauge_restored(gbox, grec.final_state, kbar);
  const quantum::Grid big{64 * kPi, 4096};
  const oracle::DirectRun run{big.length, big.points, kbar, q0 * kbar * kbar, lambda, go.dt};
  const auto direct = oracle::propagate_direct(run, quantum::init_gaussian(big, kPi / 2, 0.0, dp, kbar).amplitudes,
                                               long(periods) * spp);
  const int offset = (big.points - gbox.points) / 2;
  const std::vector<quantum::cplx> window(direct.begin() + offset, direct.begin() + offset + gbox.points);
  const double fid = fidelity(gauge, window);

  // Step halving.
  std::vector<double> a;
  for (int steps : {200, 400, 800}) {
    quantum::EvolveOptions h;
    h.tau_end = 2 * 2 * kPi;
    h.dt = 2 * kPi / steps;
    const auto r = quantum::evolve(box, quantum::init_gaussian(box, kPi / 2, 0.0, 0.5, kbar),
                                   ScaledParams::from_effective_depth(kbar, 16.0, 0.3), h);
    a.push_back(std::norm(r.overlaps.back()));
  }
  const double ratio = std::abs(a[0] - a[1]) / std::abs(a[1] - a[2]);

  const bool ok = drift < kNormTol && worst_disp < kDispersionTol && fid > 1.0 - kFidelityTol && ratio >= kRatioLo &&
                  ratio <= kRatioHi;
  os << "norm drift " << fmt(drift, 3) << " per 1e4 steps; dispersion rel " << fmt(worst_disp, 3)
     << "; gauge-vs-direct infidelity " << fmt(1.0 - fid, 3) << "; dt-halving ratio " << fmt(ratio, 4);
  return {ok, os.str()};
}

// 9 ---------------------------------------------------------------------------

Outcome identity_check() {
  constexpr double kTol = 1e-12;
  double worst = 0.0;
  int points = 0;
  for (double q0 : {4.0, 9.0, 16.0, 25.0}) {
    for (int nbar : {0, 1}) {
      for (double x : {-0.2, 0.1, 0.3}) {
        for (double lambda : {2.0, 5.0, 12.0, 30.0}) {
          if (points == 100) break;
          resonance::ResonanceContext c;
          c.N = 1;
          c.nbar = nbar;
          c.kbar = 0.5;
          c.zeta = resonance::nonlinearity(nbar, q0, resonance::Regime::Deep);
          c.beta = x;
          c.q = resonance::harmonic_q(nbar, q0, c.kbar, c.zeta, lambda);
          const resonance::TimeScales a = resonance::robust_times(c);
          const resonance::TimeScales b = resonance::robust_times_harmonic(c, q0, lambda);
          worst = std::max({worst, rel(b.t_classical, a.t_classical), rel(b.t_revival, a.t_revival),
                            rel(b.t_super_revival, a.t_super_revival)});
          ++points;
        }
      }
    }
  }
  for (double lambda = 40.0; points < 100; lambda += 7.5) {
    resonance::ResonanceContext c;
    c.kbar = 0.16;
    c.zeta = resonance::nonlinearity(0, 16.0, resonance::Regime::Deep);
    c.beta = 0.05;
    c.q = resonance::harmonic_q(0, 16.0, c.kbar, c.zeta, lambda);
    const resonance::TimeScales a = resonance::robust_times(c);
    const resonance::TimeScales b = resonance::robust_times_harmonic(c, 16.0, lambda);
    worst = std::max({worst, rel(b.t_classical, a.t_classical), rel(b.t_revival, a.t_revival),
                      rel(b.t_super_revival, a.t_super_revival)});
    ++points;
  }
  return {worst < kTol, std::to_string(points) + " parameter points, worst relative difference " + fmt(worst, 3) +
                            ", tol " + fmt(kTol, 2)};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "units", 1.0, units_check},
      {2, "band separations", 5.0, band_check},
      {3, "mathieu solver", 30.0, mathieu_check},
      {4, "undriven revival", 300.0, undriven_revival_check},
      {5, "driven recurrences", 1800.0, driven_check},
      {6, "time-scale trends", 1.0, trend_check},
      {7, "poincare structure", 120.0, poincare_check},
      {8, "propagator properties", 180.0, propagator_check},
      {9, "strong-drive identity", 1.0, identity_check},
  };
  return all;
}

bool evaluate(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.run();
  } catch (const std::exception& e) {
    out = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= c.limit_s;
  const bool passed = out.passed && in_time;
  std::printf("criterion %d (%s): %s  %s  [%.2f s, limit %.0f s%s]\n", c.id, c.title, passed ? "PASS" : "FAIL",
              out.detail.c_str(), secs, c.limit_s, in_time ? "" : ", over time");
  std::fflush(stdout);
  return passed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latrev acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  bool all_passed = true;
  for (const Criterion& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    all_passed = evaluate(c) && all_passed;
  }
  return all_passed ? 0 : 1;
}
