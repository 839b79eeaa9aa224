#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "latrev/series.hpp"
#include "latrev/units.hpp"

namespace latrev::quantum {

using cplx = std::complex<double>;

// Periodic grid z_j = -L/2 + j·dz.
struct Grid {
  double length = 32.0 * constants::kPi;
  int points = 2048;

  double dz() const { return length / points; }
  double z(int j) const { return -0.5 * length + j * dz(); }
  std::vector<double> positions() const;
  std::vector<double> wavenumbers() const;  // FFT ordering
};

// L must be a positive multiple of π and the point count a power of two.
void validate(const Grid& grid);

// Amplitudes are held in the periodic gauge frame. The physical
// wavefunction is exp(iA(τ)z/k̄) times them, with A(τ) = λ(cos τ − 1).
struct Wavefunction {
  std::vector<cplx> amplitudes;
  double time = 0.0;
  double gauge_momentum = 0.0;
};

double gauge_offset(double lambda, double tau);

double norm(const Grid& grid, const std::vector<cplx>& psi);

// Gaussian at (z0, p0) with momentum width Δp and position width k̄/(2Δp),
// normalised to ∫|ψ|²dz = 1. Wrapped periodically onto the grid.
Wavefunction init_gaussian(const Grid& grid, double z0, double p0, double delta_p, double kbar);

// Δp of the Gaussian matching the harmonic ground state of one lattice well,
// k̄q₀^{1/4}; the position width 1/(2q₀^{1/4}) does not depend on k̄.
double ground_well_delta_p(double kbar, double q0);

struct EvolveOptions {
  double tau_end = 0.0;
  double dt = constants::kTwoPi / 1000.0;
  int snapshot_stride = 0;  // steps between density snapshots; 0 = none
  bool with_interaction = false;
  bool record_overlaps = true;  // every step
};

struct EvolutionRecord {
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> densities;  // gauge-restored |ψ|² per snapshot
  std::vector<double> overlap_times;
  std::vector<cplx> overlaps;  // ⟨ψ(0)|ψ(τ)⟩ in the physical frame
  Wavefunction final_state;
  Grid grid;
  long steps = 0;
  double max_norm_drift = 0.0;
};

// Strang split-step propagation of
//   ik̄∂τψ = [-(k̄²/2)∂²z + U cos 2z + λz sin τ + G·ρ̂]ψ
// with U = q₀k̄² (linear) or the bare V₀k̄²/4 plus the mean-field term
// G·ρ̂, ρ̂ = L|ψ|² (interacting). The linear drive is carried by the gauge
// offset A(τ) so the box stays periodic; the kinetic phase integrates
// (k̄κ + A)²/(2k̄) exactly over each step.
EvolutionRecord evolve(const Grid& grid, const Wavefunction& psi0, const ScaledParams& params,
                       const EvolveOptions& options);

// Physical-frame amplitudes exp(iAz/k̄)·φ.
std::vector<cplx> gauge_restored(const Grid& grid, const Wavefunction& psi, double kbar);

AutocorrelationSeries autocorrelation(const EvolutionRecord& record);

struct DensityMap {
  std::vector<double> tau;
  std::vector<double> z;
  Eigen::MatrixXd rho;  // rows: snapshots, columns: grid points
};
DensityMap density_map(const EvolutionRecord& record);

// Imaginary-time relaxation of the undriven lattice Hamiltonian to its
// lowest state on the grid. Stops when the energy changes by less than
// `tol` between checks.
Wavefunction relax_ground_state(const Grid& grid, const ScaledParams& params, double dtau = 1e-3,
                                double tol = 1e-14, long max_steps = 2'000'000, bool with_interaction = false);

// ⟨H⟩ for the undriven Hamiltonian in the gauge frame at A = 0.
double energy(const Grid& grid, const std::vector<cplx>& psi, const ScaledParams& params, bool with_interaction);

}  // namespace latrev::quantum
