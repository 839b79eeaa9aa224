#pragma once

#include <optional>
#include <string>

namespace latrev {

namespace constants {
inline constexpr double kHbar = 1.054571817e-34;  // J s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kRb87Mass = 1.443e-25;  // kg
}  // namespace constants

// Transverse-confinement data from which the mean-field strength G can be
// derived instead of being given directly.
struct InteractionSource {
  double transverse_frequency = 0.0;  // ω⊥, rad/s
  double scattering_length = 0.0;     // a_s, m
  double mean_density = 0.0;          // n₀, 1/m
};

// Laboratory description of a shaken 1D lattice, SI units unless noted.
struct PhysicalSetup {
  double atom_mass = constants::kRb87Mass;  // kg
  double lattice_wavelength = 852e-9;       // m; lattice spacing is half of this
  double lattice_depth = 0.0;               // V₀ in recoil energies
  double drive_frequency = 0.0;             // ω_m / 2π in Hz
  double drive_amplitude = 0.0;             // ΔL in m
  double interaction_G = 0.0;               // dimensionless mean-field strength
  std::optional<InteractionSource> interaction_source;

  double lattice_spacing() const { return 0.5 * lattice_wavelength; }
  double wavenumber() const;                 // k_L = π / d_L
  double recoil_frequency() const;           // ω_r = ħk_L²/(2M), rad/s
  double recoil_energy() const;              // E_r = ħ²π²/(2M d_L²), J
  double drive_angular_frequency() const {   // ω_m, rad/s
    return constants::kTwoPi * drive_frequency;
  }
  double drive_force() const;                // F = MΔLω_m², N
};

// Dimensionless parameters of the co-moving, rescaled Hamiltonian.
struct ScaledParams {
  double kbar = 1.0;                  // k̄ = 2ω_r/ω_m
  double lattice_depth_recoil = 0.0;  // V₀ [E_r]
  double interaction_G = 0.0;         // G
  double effective_depth = 0.0;       // V′ = V₀/(1+4G) [E_r]
  double q0 = 0.0;                    // V′/4
  double lambda = 0.0;                // k_L ΔL

  // Builds the derived fields from (k̄, V₀, G, λ).
  static ScaledParams from_depth(double kbar, double depth_recoil, double G, double lambda);
  // Builds from an already screened depth V′ (G = 0, so V₀ = V′).
  static ScaledParams from_effective_depth(double kbar, double vprime, double lambda);

  // Lattice amplitude multiplying cos 2z in the τ-time equation: q₀k̄².
  double lattice_amplitude() const { return q0 * kbar * kbar; }
  // Amplitude of the bare (unscreened) lattice, V₀k̄²/4.
  double bare_lattice_amplitude() const { return 0.25 * lattice_depth_recoil * kbar * kbar; }
};

ScaledParams scale_setup(const PhysicalSetup& setup);

// Mean-field strength G = g₁D n₀ k̄ / (ħω_m) with g₁D = ħk_Lω⊥a_s.
double interaction_from_source(const PhysicalSetup& setup, const InteractionSource& source);

// Recovers ΔL from λ: the drive force F = MΔLω_m² divided by Mω_m²k_L.
double drive_amplitude_from_lambda(const PhysicalSetup& setup, double lambda);

enum class Validity { Valid, Marginal, InvalidForInteracting };

struct ValidityThresholds {
  double valid_below = 1.0;
  double marginal_below = 5.0;
};

struct ValidityReport {
  Validity status = Validity::Valid;
  double effective_depth = 0.0;
  bool linear_runs_allowed = true;
  std::string message;
};

// Checks the V′ ≪ 1 condition behind the effective-potential substitution.
ValidityReport effective_potential_validity(const ScaledParams& params,
                                            const ValidityThresholds& thresholds = {});

const char* to_string(Validity v) noexcept;

// Scaled τ = ω_m t versus the recoil time t_r = ω_r t used by the undriven
// Mathieu spectrum: τ = 2 t_r / k̄.
inline double recoil_to_drive_time(double t_recoil, double kbar) { return 2.0 * t_recoil / kbar; }
inline double drive_to_recoil_time(double tau, double kbar) { return 0.5 * kbar * tau; }

}  // namespace latrev
