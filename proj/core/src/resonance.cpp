#include "latrev/resonance.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "latrev/error.hpp"
#include "latrev/mathieu.hpp"

namespace latrev::resonance {
namespace {

using constants::kPi;

constexpr double kSeparatrixTol = 1e-6;

std::string fmt_warning(const std::string& what, double value) {
  std::ostringstream os;
  os << what << " (" << value << ")";
  return os.str();
}

void require_shallow_level(int nbar) {
  if (nbar <= 1) fail(ErrorKind::Singular, "shallow-lattice formulas are singular for nbar <= 1");
}

void require_primary(const ResonanceContext& ctx) {
  if (ctx.N != 1) fail(ErrorKind::InvalidInput, "recurrence-time formulas are derived for the primary resonance N = 1");
}

void flag_non_positive(TimeScales& t) {
  if (!(t.t_classical > 0.0)) t.validity_warnings.push_back(fmt_warning("non-positive classical period", t.t_classical));
  if (!(t.t_revival > 0.0)) t.validity_warnings.push_back(fmt_warning("non-positive revival time", t.t_revival));
  if (!(t.t_super_revival > 0.0)) {
    t.validity_warnings.push_back(fmt_warning("non-positive super-revival time", t.t_super_revival));
  }
  if (!ordered(t)) t.validity_warnings.emplace_back("time scales not ordered T_cl < T_rev < T_spr");
}

}  // namespace

const char* to_string(Regime r) noexcept { return r == Regime::Shallow ? "shallow" : "deep"; }

const char* to_string(ElementMethod m) noexcept { return m == ElementMethod::Harmonic ? "harmonic" : "numeric"; }

const char* to_string(TimeTag t) noexcept {
  switch (t) {
    case TimeTag::Undriven: return "undriven";
    case TimeTag::Delicate: return "delicate";
    case TimeTag::Robust: return "robust";
    case TimeTag::RobustHarmonic: return "robust_harmonic";
  }
  return "unknown";
}

const char* to_string(TimeUnit u) noexcept {
  switch (u) {
    case TimeUnit::Drive: return "drive";
    case TimeUnit::Recoil: return "recoil";
    case TimeUnit::Mixed: return "mixed";
  }
  return "unknown";
}

bool ordered(const TimeScales& t) {
  return t.t_classical < t.t_revival && t.t_revival < t.t_super_revival;
}

TimeScales to_drive_units(const TimeScales& t, double kbar) {
  if (!(kbar > 0.0)) fail(ErrorKind::InvalidInput, "kbar must be positive");
  TimeScales out = t;
  const double f = recoil_to_drive_time(1.0, kbar);
  if (t.unit == TimeUnit::Recoil || t.unit == TimeUnit::Mixed) {
    out.t_classical *= f;
    out.t_revival *= f;
  }
  if (t.unit == TimeUnit::Recoil) out.t_super_revival *= f;
  out.unit = TimeUnit::Drive;
  return out;
}

double classical_frequency(int nbar, double q0, Regime regime) {
  if (nbar < 0) fail(ErrorKind::InvalidInput, "nbar must be non-negative");
  if (regime == Regime::Shallow) {
    require_shallow_level(nbar);
    const double d = nbar * nbar - 1.0;
    return 2.0 * nbar * (1.0 - q0 * q0 / (2.0 * d * d));
  }
  return 4.0 * (std::sqrt(q0) - (2.0 * nbar + 1.0) / 8.0);
}

double nonlinearity(int nbar, double q0, Regime regime) {
  if (nbar < 0) fail(ErrorKind::InvalidInput, "nbar must be non-negative");
  if (regime == Regime::Shallow) {
    require_shallow_level(nbar);
    const double n2 = static_cast<double>(nbar) * nbar;
    const double d = n2 - 1.0;
    return 2.0 + q0 * q0 * (3.0 * n2 + 1.0) / (2.0 * d * d * d);
  }
  if (!(q0 > 0.0)) fail(ErrorKind::Regime, "deep-lattice nonlinearity needs q0 > 0");
  return std::abs(-1.0 - 3.0 * (2.0 * nbar + 1.0) / (16.0 * std::sqrt(q0)));
}

double matrix_element(int nbar, double q0, double /*kbar*/, ElementMethod method) {
  if (nbar < 0) fail(ErrorKind::InvalidInput, "nbar must be non-negative");
  if (method == ElementMethod::Harmonic) {
    if (!(q0 > 0.0)) fail(ErrorKind::InvalidInput, "harmonic matrix element needs q0 > 0");
    return std::sqrt(nbar + 1.0) / std::pow(q0, 0.25);
  }
  return 2.0 * mathieu::well_dipole(nbar, q0, 64);
}

double harmonic_q(int nbar, double q0, double kbar, double zeta, double lambda) {
  return 4.0 * std::sqrt(nbar + 1.0) * lambda / (std::pow(q0, 0.25) * kbar * kbar * zeta);
}

Regime select_regime(double q0, std::vector<std::string>* warnings) {
  if (q0 <= 1.0) return Regime::Shallow;
  if (q0 >= 5.0) return Regime::Deep;
  if (warnings) warnings->push_back(fmt_warning("q0 between shallow and deep limits; using deep formulas", q0));
  return Regime::Deep;
}

ResonanceContext build_context(const ScaledParams& params, const ContextOptions& options) {
  if (options.N < 1) fail(ErrorKind::InvalidInput, "resonance number N must be >= 1");
  ResonanceContext ctx;
  ctx.N = options.N;
  ctx.nbar = options.nbar;
  ctx.l = options.l;
  ctx.kbar = params.kbar;
  ctx.q0 = params.q0;
  ctx.lambda = params.lambda;
  ctx.regime = options.regime ? *options.regime : select_regime(params.q0, &ctx.warnings);

  if (ctx.regime == Regime::Shallow && params.q0 > 1.0) {
    ctx.warnings.push_back(fmt_warning("shallow formulas used above q0 = 1", params.q0));
  }
  if (ctx.regime == Regime::Deep && params.q0 < 5.0 && options.regime) {
    ctx.warnings.push_back(fmt_warning("deep formulas used below q0 = 5", params.q0));
  }

  ctx.omega = classical_frequency(ctx.nbar, ctx.q0, ctx.regime);
  ctx.zeta = nonlinearity(ctx.nbar, ctx.q0, ctx.regime);
  if (!(ctx.zeta > 0.0)) fail(ErrorKind::Singular, "nonlinearity must be positive");
  ctx.matrix_element_V = matrix_element(ctx.nbar, ctx.q0, ctx.kbar, options.method);
  if (!(ctx.matrix_element_V > 0.0)) fail(ErrorKind::Singular, "matrix element must be positive");

  const double N2 = static_cast<double>(ctx.N) * ctx.N;
  ctx.beta0 = N2 * ctx.kbar * ctx.kbar * ctx.zeta / (4.0 * ctx.matrix_element_V);
  ctx.beta = (ctx.N * ctx.omega - 1.0) / (N2 * ctx.zeta * ctx.kbar);
  ctx.q = ctx.lambda / ctx.beta0;
  return ctx;
}

TimeScales undriven_times(int nbar, double q0, Regime regime) {
  if (!(q0 >= 0.0)) fail(ErrorKind::InvalidInput, "q0 must be non-negative");
  TimeScales t;
  t.regime_tag = TimeTag::Undriven;
  t.unit = TimeUnit::Recoil;
  if (regime == Regime::Shallow) {
    require_shallow_level(nbar);
    const double n = nbar;
    const double n2 = n * n;
    const double d = n2 - 1.0;
    t.t_classical = (1.0 + q0 * q0 / (2.0 * d * d)) * kPi / n;
    t.t_revival = 2.0 * kPi * (1.0 - q0 * q0 * (3.0 * n2 + 1.0) / (2.0 * d * d * d));
    if (q0 == 0.0) {
      t.t_super_revival = std::numeric_limits<double>::infinity();
      t.validity_warnings.emplace_back("super-revival unbounded at q0 = 0");
    } else {
      t.t_super_revival = kPi * std::pow(d, 4) / (q0 * q0 * n * (n2 + 1.0));
    }
    if (q0 > 1.0) t.validity_warnings.push_back(fmt_warning("shallow formulas used above q0 = 1", q0));
  } else {
    if (!(q0 > 0.0)) fail(ErrorKind::Regime, "deep-lattice time scales need q0 > 0");
    const double s = 2.0 * nbar + 1.0;
    const double rq = std::sqrt(q0);
    t.t_classical = kPi / (2.0 * rq) * (1.0 + s / (8.0 * rq) + 3.0 * (s * s + 1.0) / (256.0 * q0));
    t.t_revival = 4.0 * kPi * (1.0 - 3.0 * s / (16.0 * q0));
    t.t_super_revival = 32.0 * kPi * rq;
    if (q0 < 5.0) t.validity_warnings.push_back(fmt_warning("deep formulas used below q0 = 5", q0));
  }
  flag_non_positive(t);
  return t;
}

TimeScales delicate_times(const ResonanceContext& ctx, const TimeScales& undriven) {
  require_primary(ctx);
  const double x = ctx.detuning();
  const double D = 4.0 * x * x - 1.0;
  if (std::abs(D) < kSeparatrixTol) fail(ErrorKind::Singular, "separatrix divergence: 4(l+beta)^2 = 1");
  if (ctx.N * ctx.omega == 1.0) fail(ErrorKind::Singular, "Delta diverges at N*omega = 1");
  if (x == 0.0) fail(ErrorKind::Singular, "super-revival undefined at l + beta = 0");

  TimeScales t;
  t.regime_tag = TimeTag::Delicate;
  t.unit = TimeUnit::Mixed;
  if (ctx.q > 1.0) t.validity_warnings.push_back(fmt_warning("weak-drive formulas used above q = 1", ctx.q));

  const double q2 = ctx.q * ctx.q;
  const double delta = 1.0 / (1.0 - 1.0 / (ctx.N * ctx.omega));
  t.t_classical = undriven.t_classical * (1.0 + 0.5 * q2 / (D * D)) * delta;
  t.t_revival = undriven.t_revival * (1.0 - 0.5 * q2 * (12.0 * x * x + 1.0) / (D * D * D));
  if (ctx.q == 0.0) {
    t.t_super_revival = std::numeric_limits<double>::infinity();
    t.validity_warnings.emplace_back("super-revival unbounded at q = 0");
  } else {
    t.t_super_revival = kPi * std::pow(D, 4) / (2.0 * ctx.zeta * ctx.kbar * q2 * x * (4.0 * x * x + 1.0));
  }
  flag_non_positive(t);
  return t;
}

TimeScales robust_times(const ResonanceContext& ctx) {
  require_primary(ctx);
  const double s = 4.0 * ctx.detuning() + 1.0;
  const double rq = std::sqrt(ctx.q);
  const double gap = rq - s / 8.0;
  if (!(gap > 0.0)) fail(ErrorKind::Regime, "negative period: sqrt(q) <= (4(l+beta)+1)/8");

  TimeScales t;
  t.regime_tag = TimeTag::Robust;
  t.unit = TimeUnit::Drive;
  if (ctx.q < 5.0) t.validity_warnings.push_back(fmt_warning("strong-drive formulas used below q = 5", ctx.q));
  const double kz = ctx.kbar * ctx.zeta;
  t.t_classical = 2.0 * kPi / (kz * gap);
  t.t_revival = 8.0 * kPi / kz * (1.0 - 3.0 * s / (16.0 * rq));
  t.t_super_revival = 32.0 * kPi * rq / kz;
  flag_non_positive(t);
  return t;
}

TimeScales robust_times_harmonic(const ResonanceContext& ctx, double q0, double lambda) {
  require_primary(ctx);
  if (!(lambda > 0.0)) fail(ErrorKind::InvalidInput, "harmonic strong-drive formulas need lambda > 0");
  if (!(q0 > 0.0)) fail(ErrorKind::InvalidInput, "harmonic strong-drive formulas need q0 > 0");
  const double s = 4.0 * ctx.detuning() + 1.0;
  const double n4 = std::pow(ctx.nbar + 1.0, 0.25);
  const double q8 = std::pow(q0, 0.125);
  const double rl = std::sqrt(lambda);
  const double rz = std::sqrt(ctx.zeta);
  const double k = ctx.kbar;
  const double denom = 16.0 * n4 * rl - s * q8 * k * rz;
  if (!(denom > 0.0)) fail(ErrorKind::Regime, "harmonic classical-period denominator is non-positive");

  TimeScales t;
  t.regime_tag = TimeTag::RobustHarmonic;
  t.unit = TimeUnit::Drive;
  if (ctx.regime != Regime::Deep) t.validity_warnings.emplace_back("harmonic approximation outside deep regime");
  t.t_classical = 16.0 * kPi * q8 / rz / denom;
  t.t_revival = 8.0 * kPi / (k * ctx.zeta) * (1.0 - 3.0 * s * q8 * k * rz / (32.0 * n4 * rl));
  t.t_super_revival = 64.0 * kPi * n4 * rl / (k * k * std::pow(ctx.zeta, 1.5) * q8);
  flag_non_positive(t);
  return t;
}

std::vector<double> resonance_orders(const ResonanceContext& ctx, const std::vector<int>& l_values) {
  std::vector<double> out;
  out.reserve(l_values.size());
  for (int l : l_values) out.push_back(2.0 * (l + ctx.beta));
  return out;
}

std::vector<QuasiEnergy> quasienergy_spectrum(const ResonanceContext& ctx, const std::vector<int>& j_values,
                                              const std::vector<double>& nu_values, double winding) {
  const double N2 = static_cast<double>(ctx.N) * ctx.N;
  const double scale = N2 * ctx.kbar * ctx.kbar * ctx.zeta / 8.0;
  std::vector<QuasiEnergy> out;
  out.reserve(j_values.size() * nu_values.size());
  for (int j : j_values) {
    if (j < 0 || j >= ctx.N) fail(ErrorKind::InvalidInput, "j must lie in [0, N-1]");
    const double mu = 2.0 * j / ctx.N;
    for (double nu : nu_values) {
      const double a = mathieu::char_value(std::abs(nu + mu), ctx.q);
      const double e = scale * a + ctx.kbar * winding * j;
      double reduced = std::fmod(e, ctx.kbar);
      if (reduced < 0.0) reduced += ctx.kbar;
      if (reduced >= ctx.kbar) reduced = 0.0;
      out.push_back({j, nu, reduced, e});
    }
  }
  return out;
}

Formula parse_formula(const std::string& name) {
  if (name == "auto") return Formula::Auto;
  if (name == "undriven") return Formula::Undriven;
  if (name == "delicate") return Formula::Delicate;
  if (name == "robust") return Formula::Robust;
  if (name == "robust-harmonic") return Formula::RobustHarmonic;
  fail(ErrorKind::Validation,
       "unknown regime '" + name + "'; expected auto, undriven, delicate, robust or robust-harmonic");
}

TimeScales evaluate(const ResonanceContext& ctx, Formula formula) {
  if (formula == Formula::Auto) {
    formula = ctx.lambda == 0.0 ? Formula::Undriven : ctx.q >= 5.0 ? Formula::Robust : Formula::Delicate;
  }
  switch (formula) {
    case Formula::Undriven: return to_drive_units(undriven_times(ctx.nbar, ctx.q0, ctx.regime), ctx.kbar);
    case Formula::Delicate:
      return to_drive_units(delicate_times(ctx, undriven_times(ctx.nbar, ctx.q0, ctx.regime)), ctx.kbar);
    case Formula::Robust: return robust_times(ctx);
    case Formula::RobustHarmonic: return robust_times_harmonic(ctx, ctx.q0, ctx.lambda);
    case Formula::Auto: break;
  }
  fail(ErrorKind::Assertion, "unreachable formula selection");
}

}  // namespace latrev::resonance
