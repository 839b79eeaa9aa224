#include "latrev/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "latrev/error.hpp"

namespace latrev::quantum {
namespace {

using constants::kPi;
using constants::kTwoPi;

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    forward_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!buf_ || !forward_ || !backward_) fail(ErrorKind::NumericalFailure, "FFTW plan creation failed");
  }
  ~Fft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  int size() const { return n_; }
  void forward() { fftw_execute(forward_); }
  // Unnormalised; callers fold 1/n into their momentum-space factor.
  void backward() { fftw_execute(backward_); }

 private:
  int n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double wrap(double d, double length) {
  d = std::fmod(d + 0.5 * length, length);
  if (d < 0.0) d += length;
  return d - 0.5 * length;
}

double lattice_amplitude(const ScaledParams& params, bool with_interaction) {
  return with_interaction ? params.bare_lattice_amplitude() : params.lattice_amplitude();
}

// ∫A ds and ∫A² ds over [t, t+h] for A = λ(cos s − 1).
void gauge_integrals(double lambda, double t, double h, double& i1, double& i2) {
  const double ds = std::sin(t + h) - std::sin(t);
  const double ds2 = std::sin(2.0 * (t + h)) - std::sin(2.0 * t);
  i1 = lambda * (ds - h);
  i2 = lambda * lambda * (0.5 * h + 0.25 * ds2 - 2.0 * ds + h);
}

}  // namespace

std::vector<double> Grid::positions() const {
  std::vector<double> z(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) z[j] = this->z(j);
  return z;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(static_cast<std::size_t>(points));
  const double dk = kTwoPi / length;
  for (int j = 0; j < points; ++j) k[j] = dk * (j < points / 2 ? j : j - points);
  return k;
}

void validate(const Grid& grid) {
  if (!is_power_of_two(grid.points) || grid.points < 4) {
    fail(ErrorKind::Validation, "grid points must be a power of two (>= 4)");
  }
  const double cells = grid.length / kPi;
  if (!(grid.length > 0.0) || std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
    fail(ErrorKind::Validation, "grid length must be a positive multiple of pi");
  }
}

double gauge_offset(double lambda, double tau) { return lambda * (std::cos(tau) - 1.0); }

double norm(const Grid& grid, const std::vector<cplx>& psi) {
  double s = 0.0;
  for (const cplx& c : psi) s += std::norm(c);
  return s * grid.dz();
}

Wavefunction init_gaussian(const Grid& grid, double z0, double p0, double delta_p, double kbar) {
  validate(grid);
  if (!(delta_p > 0.0)) fail(ErrorKind::InvalidInput, "delta_p must be positive");
  if (!(kbar > 0.0)) fail(ErrorKind::InvalidInput, "kbar must be positive");
  const double sigma = kbar / (2.0 * delta_p);
  if (sigma > grid.length / 8.0) {
    std::ostringstream os;
    os << "grid too small: packet width " << sigma << " exceeds L/8 = " << grid.length / 8.0;
    fail(ErrorKind::Validation, os.str());
  }
  Wavefunction wf;
  wf.amplitudes.resize(static_cast<std::size_t>(grid.points));
  for (int j = 0; j < grid.points; ++j) {
    const double d = wrap(grid.z(j) - z0, grid.length);
    wf.amplitudes[j] = std::polar(std::exp(-d * d / (4.0 * sigma * sigma)), p0 * d / kbar);
  }
  const double s = 1.0 / std::sqrt(norm(grid, wf.amplitudes));
  for (cplx& c : wf.amplitudes) c *= s;
  return wf;
}

double ground_well_delta_p(double kbar, double q0) {
  if (!(q0 > 0.0)) fail(ErrorKind::InvalidInput, "ground-well width needs q0 > 0");
  return kbar * std::pow(q0, 0.25);
}

std::vector<cplx> gauge_restored(const Grid& grid, const Wavefunction& psi, double kbar) {
  std::vector<cplx> out(psi.amplitudes.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = psi.amplitudes[j] * std::polar(1.0, psi.gauge_momentum * grid.z(static_cast<int>(j)) / kbar);
  }
  return out;
}

EvolutionRecord evolve(const Grid& grid, const Wavefunction& psi0, const ScaledParams& params,
                       const EvolveOptions& options) {
  validate(grid);
  const int n = grid.points;
  if (psi0.amplitudes.size() != static_cast<std::size_t>(n)) {
    fail(ErrorKind::InvalidInput, "wavefunction size does not match the grid");
  }
  if (!(params.kbar > 0.0)) fail(ErrorKind::InvalidInput, "kbar must be positive");
  const double dt = options.dt;
  if (!(dt > 0.0) || dt > kTwoPi / 200.0 * (1.0 + 1e-12)) fail(ErrorKind::Validation, "dt must lie in (0, 2pi/200]");
  const double span = options.tau_end - psi0.time;
  if (span < 0.0) fail(ErrorKind::InvalidInput, "tau_end precedes the initial time");
  const long steps = std::lround(span / dt);
  if (std::abs(steps * dt - span) > 1e-9 * std::max(1.0, span)) {
    fail(ErrorKind::Validation, "dt must divide the evolution span");
  }
  const double lambda = params.lambda;
  if (std::abs(psi0.gauge_momentum - gauge_offset(lambda, psi0.time)) > 1e-12 * std::max(1.0, lambda)) {
    fail(ErrorKind::InvalidInput, "initial gauge offset inconsistent with its time");
  }

  const double kb = params.kbar;
  const double G = options.with_interaction ? params.interaction_G : 0.0;
  const double U = lattice_amplitude(params, options.with_interaction);
  const double L = grid.length;
  const double dz = grid.dz();
  const std::vector<double> z = grid.positions();
  const std::vector<double> kappa = grid.wavenumbers();

  std::vector<double> vlat(n);
  for (int j = 0; j < n; ++j) vlat[j] = U * std::cos(2.0 * z[j]);

  Fft fft(n);
  cplx* phi = fft.data();
  std::copy(psi0.amplitudes.begin(), psi0.amplitudes.end(), phi);

  double rho_max = 0.0;
  for (int j = 0; j < n; ++j) rho_max = std::max(rho_max, L * std::norm(phi[j]));
  const double vmax = std::abs(U) + G * rho_max;
  if (dt * vmax / kb > kPi) fail(ErrorKind::Validation, "time step too large: dt*max|V|/kbar exceeds pi");

  const double norm0 = norm(grid, psi0.amplitudes);
  const std::vector<cplx> ref = gauge_restored(grid, psi0, kb);

  EvolutionRecord rec;
  rec.grid = grid;
  rec.steps = steps;
  auto overlap_at = [&](double tau) {
    const double a = gauge_offset(lambda, tau);
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += std::conj(ref[j]) * phi[j] * std::polar(1.0, a * z[j] / kb);
    return s * dz;
  };
  auto snapshot = [&](double tau) {
    std::vector<double> rho(n);
    for (int j = 0; j < n; ++j) rho[j] = std::norm(phi[j]);
    rec.snapshot_times.push_back(tau);
    rec.densities.push_back(std::move(rho));
  };
  if (options.record_overlaps) {
    rec.overlap_times.reserve(static_cast<std::size_t>(steps) + 1);
    rec.overlaps.reserve(static_cast<std::size_t>(steps) + 1);
    rec.overlap_times.push_back(psi0.time);
    rec.overlaps.push_back(overlap_at(psi0.time));
  }
  if (options.snapshot_stride > 0) snapshot(psi0.time);

  const double half = 0.5 * dt / kb;
  std::vector<cplx> lattice_kick;
  if (G == 0.0) {
    lattice_kick.resize(n);
    for (int j = 0; j < n; ++j) lattice_kick[j] = std::polar(1.0, -vlat[j] * half);
  }
  auto potential_half_step = [&] {
    if (G == 0.0) {
      for (int j = 0; j < n; ++j) phi[j] *= lattice_kick[j];
    } else {
      for (int j = 0; j < n; ++j) phi[j] *= std::polar(1.0, -(vlat[j] + G * L * std::norm(phi[j])) * half);
    }
  };

  std::vector<double> kin_static(n), kin_linear(n);
  for (int j = 0; j < n; ++j) {
    kin_static[j] = kb * kappa[j] * kappa[j] * dt / 2.0;  // (k̄κ)²dt/(2k̄)
    kin_linear[j] = kappa[j];                              // 2k̄κ·∫A/(2k̄) = κ∫A
  }
  const double inv_n = 1.0 / n;

  for (long k = 0; k < steps; ++k) {
    const double t = psi0.time + static_cast<double>(k) * dt;
    const double t_next = psi0.time + static_cast<double>(k + 1) * dt;
    double i1 = 0.0, i2 = 0.0;
    gauge_integrals(lambda, t, t_next - t, i1, i2);
    const double quad = i2 / (2.0 * kb);

    potential_half_step();
    fft.forward();
    for (int j = 0; j < n; ++j) phi[j] *= std::polar(inv_n, -(kin_static[j] + kin_linear[j] * i1 + quad));
    fft.backward();
    potential_half_step();

    if (options.record_overlaps) {
      rec.overlap_times.push_back(t_next);
      rec.overlaps.push_back(overlap_at(t_next));
    }
    if (options.snapshot_stride > 0 && (k + 1) % options.snapshot_stride == 0) snapshot(t_next);

    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::norm(phi[j]);
    const double drift = std::abs(s * dz - norm0);
    rec.max_norm_drift = std::max(rec.max_norm_drift, drift);
    if (!(drift <= 1e-9)) {
      std::ostringstream os;
      os << "norm drift " << drift << " at tau = " << t_next;
      fail(ErrorKind::NumericalFailure, os.str());
    }
  }

  rec.final_state.amplitudes.assign(phi, phi + n);
  rec.final_state.time = psi0.time + static_cast<double>(steps) * dt;
  rec.final_state.gauge_momentum = gauge_offset(lambda, rec.final_state.time);
  return rec;
}

AutocorrelationSeries autocorrelation(const EvolutionRecord& record) {
  AutocorrelationSeries s;
  s.times = record.overlap_times;
  s.values.reserve(record.overlaps.size());
  for (const cplx& a : record.overlaps) s.values.push_back(std::norm(a));
  s.source = "quantum.evolve";
  return s;
}

DensityMap density_map(const EvolutionRecord& record) {
  DensityMap m;
  m.tau = record.snapshot_times;
  m.z = record.grid.positions();
  m.rho.resize(static_cast<Eigen::Index>(record.densities.size()), record.grid.points);
  for (std::size_t i = 0; i < record.densities.size(); ++i) {
    for (int j = 0; j < record.grid.points; ++j) m.rho(static_cast<Eigen::Index>(i), j) = record.densities[i][j];
  }
  return m;
}

double energy(const Grid& grid, const std::vector<cplx>& psi, const ScaledParams& params, bool with_interaction) {
  const int n = grid.points;
  const double U = lattice_amplitude(params, with_interaction);
  const double G = with_interaction ? params.interaction_G : 0.0;
  const std::vector<double> kappa = grid.wavenumbers();
  const double dz = grid.dz();
  Fft fft(n);
  std::copy(psi.begin(), psi.end(), fft.data());
  fft.forward();
  double kinetic = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p = params.kbar * kappa[j];
    kinetic += std::norm(fft.data()[j]) * 0.5 * p * p;
  }
  kinetic *= dz / n;
  double potential = 0.0;
  for (int j = 0; j < n; ++j) {
    const double rho = std::norm(psi[j]);
    potential += rho * (U * std::cos(2.0 * grid.z(j)) + 0.5 * G * grid.length * rho);
  }
  return kinetic + potential * dz;
}

Wavefunction relax_ground_state(const Grid& grid, const ScaledParams& params, double dtau, double tol, long max_steps,
                                bool with_interaction) {
  validate(grid);
  if (!(dtau > 0.0)) fail(ErrorKind::InvalidInput, "imaginary time step must be positive");
  const int n = grid.points;
  const double kb = params.kbar;
  const double U = lattice_amplitude(params, with_interaction);
  const double G = with_interaction ? params.interaction_G : 0.0;
  const double L = grid.length;
  const double dz = grid.dz();
  const std::vector<double> kappa = grid.wavenumbers();
  std::vector<double> vlat(n), kin(n);
  for (int j = 0; j < n; ++j) {
    vlat[j] = U * std::cos(2.0 * grid.z(j));
    kin[j] = std::exp(-0.5 * kb * kappa[j] * kappa[j] * dtau) / n;
  }

  Fft fft(n);
  cplx* phi = fft.data();
  for (int j = 0; j < n; ++j) phi[j] = 1.0 / std::sqrt(L);
  auto renormalise = [&] {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::norm(phi[j]);
    const double f = 1.0 / std::sqrt(s * dz);
    for (int j = 0; j < n; ++j) phi[j] *= f;
  };
  auto half_potential = [&] {
    for (int j = 0; j < n; ++j) phi[j] *= std::exp(-(vlat[j] + G * L * std::norm(phi[j])) * 0.5 * dtau / kb);
  };

  double e_prev = std::numeric_limits<double>::infinity();
  for (long k = 1; k <= max_steps; ++k) {
    half_potential();
    fft.forward();
    for (int j = 0; j < n; ++j) phi[j] *= kin[j];
    fft.backward();
    half_potential();
    renormalise();
    if (k % 100 == 0) {
      const double e = energy(grid, std::vector<cplx>(phi, phi + n), params, with_interaction);
      if (std::abs(e - e_prev) < tol * std::max(1.0, std::abs(e))) {
        Wavefunction wf;
        wf.amplitudes.assign(phi, phi + n);
        return wf;
      }
      e_prev = e;
    }
  }
  fail(ErrorKind::Convergence, "imaginary-time relaxation did not converge");
}

}  // namespace latrev::quantum
