#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

// Split-step integrator for
//   ik̄∂τψ = [-(k̄²/2)∂²z + U cos 2z + λ z sin τ]ψ
// with the drive applied directly as a potential. The box is not periodic in
// the drive, so the packet has to stay well away from the edges. Test use only.
namespace oracle {

struct DirectRun {
  double length = 0.0;
  int points = 0;
  double kbar = 1.0;
  double lattice = 0.0;  // U
  double lambda = 0.0;
  double dt = 0.0;
};

inline std::vector<std::complex<double>> propagate_direct(const DirectRun& run,
                                                          std::vector<std::complex<double>> psi, long steps) {
  using cplx = std::complex<double>;
  const double pi = std::acos(-1.0);
  const int n = run.points;
  const double dz = run.length / n;
  std::vector<double> z(n), k(n);
  for (int j = 0; j < n; ++j) {
    z[j] = -0.5 * run.length + j * dz;
    const int m = j < n / 2 ? j : j - n;
    k[j] = 2.0 * pi * m / run.length;
  }
  std::vector<cplx> kinetic(n);
  for (int j = 0; j < n; ++j) kinetic[j] = std::polar(1.0, -0.5 * run.kbar * k[j] * k[j] * run.dt);

  Eigen::FFT<double> fft;
  std::vector<cplx> spec(n);
  auto half_kick = [&](double tau) {
    for (int j = 0; j < n; ++j) {
      const double v = run.lattice * std::cos(2.0 * z[j]) + run.lambda * z[j] * std::sin(tau);
      psi[j] *= std::polar(1.0, -0.5 * v * run.dt / run.kbar);
    }
  };
  double tau = 0.0;
  for (long s = 0; s < steps; ++s) {
    half_kick(tau);
    fft.fwd(spec, psi);
    for (int j = 0; j < n; ++j) spec[j] *= kinetic[j];
    fft.inv(psi, spec);
    tau = (s + 1) * run.dt;
    half_kick(tau);
  }
  return psi;
}

}  // namespace oracle
