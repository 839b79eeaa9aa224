#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latrev/units.hpp"

namespace latrev::resonance {

enum class Regime { Shallow, Deep };
enum class ElementMethod { Harmonic, Numeric };
enum class TimeTag { Undriven, Delicate, Robust, RobustHarmonic };

// Units a time-scale triple is expressed in. The undriven lattice formulas
// measure time in recoil units t·ω_r; the driven formulas measure it in the
// drive phase τ = ω_m t. `Mixed` marks the weak-drive triple, whose first two
// entries inherit recoil units from the undriven ones while the third is in
// drive units.
enum class TimeUnit { Drive, Recoil, Mixed };

const char* to_string(Regime r) noexcept;
const char* to_string(ElementMethod m) noexcept;
const char* to_string(TimeTag t) noexcept;
const char* to_string(TimeUnit u) noexcept;

struct TimeScales {
  double t_classical = 0.0;
  double t_revival = 0.0;
  double t_super_revival = 0.0;
  TimeTag regime_tag = TimeTag::Undriven;
  TimeUnit unit = TimeUnit::Drive;
  std::vector<std::string> validity_warnings;
};

struct ResonanceContext {
  int N = 1;
  int nbar = 0;
  Regime regime = Regime::Deep;
  double omega = 0.0;
  double zeta = 0.0;
  double kbar = 0.0;
  double beta0 = 0.0;
  double beta = 0.0;
  double q = 0.0;
  int l = 0;
  double matrix_element_V = 0.0;
  double q0 = 0.0;
  double lambda = 0.0;
  std::vector<std::string> warnings;

  double detuning() const { return l + beta; }  // l + β
};

double classical_frequency(int nbar, double q0, Regime regime);
double nonlinearity(int nbar, double q0, Regime regime);

// Harmonic: √(n̄+1)/q₀^{1/4}. Numeric: twice the in-well dipole element
// between adjacent levels; the factor makes λ/β₀ with the recoil-unit ζ the
// Mathieu parameter of the resonance, and reproduces the harmonic value in the
// deep-well limit.
double matrix_element(int nbar, double q0, double kbar, ElementMethod method);

struct ContextOptions {
  int N = 1;
  int nbar = 0;
  int l = 0;
  ElementMethod method = ElementMethod::Harmonic;
  std::optional<Regime> regime;  // auto-select from q₀ when empty
};

Regime select_regime(double q0, std::vector<std::string>* warnings = nullptr);

ResonanceContext build_context(const ScaledParams& params, const ContextOptions& options = {});

TimeScales undriven_times(int nbar, double q0, Regime regime);
TimeScales delicate_times(const ResonanceContext& ctx, const TimeScales& undriven);
TimeScales robust_times(const ResonanceContext& ctx);
TimeScales robust_times_harmonic(const ResonanceContext& ctx, double q0, double lambda);

enum class Formula { Auto, Undriven, Delicate, Robust, RobustHarmonic };

// "auto", "undriven", "delicate", "robust" or "robust-harmonic".
Formula parse_formula(const std::string& name);

// The selected triple in drive units. Auto picks the undriven formulas at
// λ = 0, the strong-drive ones for q >= 5 and the weak-drive ones otherwise.
TimeScales evaluate(const ResonanceContext& ctx, Formula formula);

// q ≈ 4√(n̄+1)λ/(q₀^{1/4}k̄²ζ): the harmonic-oscillator estimate of λ/β₀.
double harmonic_q(int nbar, double q0, double kbar, double zeta, double lambda);

struct QuasiEnergy {
  int j = 0;
  double nu_branch = 0.0;
  double energy = 0.0;       // reduced into [0, k̄)
  double unreduced = 0.0;    // before the modulo
};

// ν = 2(l + β) for each band offset l.
std::vector<double> resonance_orders(const ResonanceContext& ctx, const std::vector<int>& l_values);

// E = [(N²k̄²ζ/8)·a_{|ν+μ(j)|}(q) + k̄α̃j] mod k̄ with μ(j) = 2j/N and ω_m = 1.
std::vector<QuasiEnergy> quasienergy_spectrum(const ResonanceContext& ctx, const std::vector<int>& j_values,
                                              const std::vector<double>& nu_values, double winding = 0.0);

bool ordered(const TimeScales& t);

// Re-expresses a triple in drive phase τ. Recoil-unit entries are scaled by
// 2/k̄ (t_r = k̄τ/2); for a mixed triple only the first two entries are.
TimeScales to_drive_units(const TimeScales& t, double kbar);

}  // namespace latrev::resonance
