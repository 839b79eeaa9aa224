#include "latrev/units.hpp"

#include <cmath>
#include <sstream>

#include "latrev/error.hpp"

namespace latrev {

double PhysicalSetup::wavenumber() const { return constants::kPi / lattice_spacing(); }

double PhysicalSetup::recoil_frequency() const {
  const double k = wavenumber();
  return constants::kHbar * k * k / (2.0 * atom_mass);
}

double PhysicalSetup::recoil_energy() const {
  const double d = lattice_spacing();
  return constants::kHbar * constants::kHbar * constants::kPi * constants::kPi / (2.0 * atom_mass * d * d);
}

double PhysicalSetup::drive_force() const {
  const double w = drive_angular_frequency();
  return atom_mass * drive_amplitude * w * w;
}

ScaledParams ScaledParams::from_depth(double kbar, double depth_recoil, double G, double lambda) {
  if (!(kbar > 0.0)) fail(ErrorKind::InvalidInput, "kbar must be positive");
  if (!(depth_recoil >= 0.0)) fail(ErrorKind::InvalidInput, "lattice depth must be non-negative");
  if (!(G >= 0.0)) fail(ErrorKind::InvalidInput, "interaction G must be non-negative");
  if (!(lambda >= 0.0)) fail(ErrorKind::InvalidInput, "drive amplitude lambda must be non-negative");
  ScaledParams p;
  p.kbar = kbar;
  p.lattice_depth_recoil = depth_recoil;
  p.interaction_G = G;
  p.effective_depth = depth_recoil / (1.0 + 4.0 * G);
  p.q0 = 0.25 * p.effective_depth;
  p.lambda = lambda;
  return p;
}

ScaledParams ScaledParams::from_effective_depth(double kbar, double vprime, double lambda) {
  return from_depth(kbar, vprime, 0.0, lambda);
}

double interaction_from_source(const PhysicalSetup& setup, const InteractionSource& source) {
  const double k = setup.wavenumber();
  const double g1d = constants::kHbar * k * source.transverse_frequency * source.scattering_length;
  const double kbar = 2.0 * setup.recoil_frequency() / setup.drive_angular_frequency();
  return g1d * source.mean_density * kbar / (constants::kHbar * setup.drive_angular_frequency());
}

ScaledParams scale_setup(const PhysicalSetup& setup) {
  if (!(setup.atom_mass > 0.0)) fail(ErrorKind::InvalidInput, "atom_mass must be positive");
  if (!(setup.lattice_wavelength > 0.0)) fail(ErrorKind::InvalidInput, "lattice_wavelength must be positive");
  if (!(setup.drive_frequency > 0.0)) fail(ErrorKind::InvalidInput, "drive_frequency must be positive");
  if (!(setup.drive_amplitude >= 0.0)) fail(ErrorKind::InvalidInput, "drive_amplitude must be non-negative");
  if (!(setup.lattice_depth >= 0.0)) fail(ErrorKind::InvalidInput, "lattice_depth must be non-negative");

  const double kbar = 2.0 * setup.recoil_frequency() / setup.drive_angular_frequency();
  const double lambda = setup.wavenumber() * setup.drive_amplitude;
  double G = setup.interaction_G;
  if (setup.interaction_source) G = interaction_from_source(setup, *setup.interaction_source);
  return ScaledParams::from_depth(kbar, setup.lattice_depth, G, lambda);
}

double drive_amplitude_from_lambda(const PhysicalSetup& setup, double lambda) {
  const double w = setup.drive_angular_frequency();
  const double force = setup.atom_mass * (lambda / setup.wavenumber()) * w * w;
  return force / (setup.atom_mass * w * w);
}

const char* to_string(Validity v) noexcept {
  switch (v) {
    case Validity::Valid: return "valid";
    case Validity::Marginal: return "marginal";
    case Validity::InvalidForInteracting: return "invalid-for-interacting";
  }
  return "unknown";
}

ValidityReport effective_potential_validity(const ScaledParams& params, const ValidityThresholds& thresholds) {
  ValidityReport r;
  r.effective_depth = params.effective_depth;
  std::ostringstream msg;
  msg << "V' = " << params.effective_depth << " E_r";
  if (params.effective_depth < thresholds.valid_below) {
    r.status = Validity::Valid;
    msg << " < " << thresholds.valid_below << ": effective potential valid";
  } else if (params.effective_depth < thresholds.marginal_below) {
    r.status = Validity::Marginal;
    msg << ": effective potential marginal";
  } else {
    r.status = Validity::InvalidForInteracting;
    msg << ": invalid for interacting runs; linear runs unaffected";
  }
  r.linear_runs_allowed = true;
  r.message = msg.str();
  return r;
}

}  // namespace latrev
