#include "latrev/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gsl/gsl_integration.h>
#include <lapacke.h>

#include "latrev/error.hpp"

namespace latrev::mathieu {
namespace {

struct Reduced {
  double nu_r;  // in [-1, 1]
  int shift;    // ν = ν_r + 2·shift
};

Reduced reduce_order(double nu) {
  const double abs_nu = std::abs(nu);
  const int shift = static_cast<int>(std::lround(abs_nu / 2.0));
  return {abs_nu - 2.0 * shift, shift};
}

int effective_truncation(int truncation, int shift) {
  return std::max(truncation, shift + kMinTruncation);
}

void fill_tridiagonal(double nu_r, double q, int M, std::vector<double>& diag, std::vector<double>& off) {
  const int n = 2 * M + 1;
  diag.resize(n);
  off.assign(n > 0 ? n - 1 : 0, q);
  for (int i = 0; i < n; ++i) {
    const double k = nu_r + 2.0 * (i - M);
    diag[i] = k * k;
  }
}

// k-th smallest eigenvalue (0-based) by Sturm-sequence bisection. Bisection is
// componentwise backward stable, so the large diagonal entries far from the
// eigenvector's support do not degrade its accuracy.
double kth_eigenvalue(std::vector<double>& diag, std::vector<double>& off, int k) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  lapack_int found = 0, nsplit = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dstebz('I', 'E', n, 0.0, 0.0, k + 1, k + 1, abstol, diag.data(), off.data(),
                                         &found, &nsplit, w.data(), iblock.data(), isplit.data());
  if (info != 0 || found < 1) {
    std::ostringstream os;
    os << "dstebz failed (info=" << info << ") for eigenvalue index " << k;
    fail(ErrorKind::NumericalFailure, os.str());
  }
  return w[0];
}

bool is_integer(double x) { return x == std::floor(x); }

}  // namespace

int branch_rank(double nu, int truncation) {
  const double abs_nu = std::abs(nu);
  const auto [nu_r, shift] = reduce_order(abs_nu);
  const int M = effective_truncation(truncation, shift);
  const double target = abs_nu * abs_nu;
  int rank = 0;
  for (int m = -M; m <= M; ++m) {
    const double k = nu_r + 2.0 * m;
    if (k * k < target) ++rank;
  }
  if (abs_nu > 0.0 && is_integer(abs_nu)) ++rank;
  return rank;
}

double char_value_at_truncation(double nu, double q, int truncation) {
  if (truncation < kMinTruncation) fail(ErrorKind::InvalidInput, "truncation must be at least 8");
  if (!(q >= 0.0)) fail(ErrorKind::InvalidInput, "Mathieu parameter q must be non-negative");
  const auto [nu_r, shift] = reduce_order(nu);
  const int M = effective_truncation(truncation, shift);
  std::vector<double> diag, off;
  fill_tridiagonal(nu_r, q, M, diag, off);
  return kth_eigenvalue(diag, off, branch_rank(nu, truncation));
}

double char_value(const MathieuQuery& query) {
  if (!std::isfinite(query.order_nu)) fail(ErrorKind::InvalidInput, "order must be finite");
  int M = std::max(query.truncation, kMinTruncation);
  double previous = char_value_at_truncation(query.order_nu, query.q, M);
  while (2 * M <= kMaxTruncation) {
    M *= 2;
    const double current = char_value_at_truncation(query.order_nu, query.q, M);
    if (std::abs(current - previous) <= kConvergenceTol * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  std::ostringstream os;
  os << "characteristic value for nu=" << query.order_nu << ", q=" << query.q << " not converged at truncation "
     << kMaxTruncation;
  fail(ErrorKind::Convergence, os.str());
}

double char_value(double nu, double q) { return char_value(MathieuQuery{nu, q, 64}); }

double char_value_small_q(double nu, double q) {
  if (std::abs(std::abs(nu) - 1.0) < 0.1) {
    fail(ErrorKind::Regime, "small-q expansion invalid for |nu - 1| < 0.1");
  }
  const double nu2 = nu * nu;
  return nu2 + q * q / (2.0 * (nu2 - 1.0));
}

double char_value_large_q(int s, double q) {
  if (s < 1 || s % 2 == 0) fail(ErrorKind::InvalidInput, "large-q branch index s must be a positive odd integer");
  if (q < 5.0) fail(ErrorKind::Regime, "large-q expansion requires q >= 5");
  const double sd = static_cast<double>(s);
  return -2.0 * q + 2.0 * sd * std::sqrt(q) - (sd * sd + 1.0) / 8.0;
}

double band_energy(int n, double kappa, double q0) {
  if (n < 0) fail(ErrorKind::InvalidInput, "band index must be non-negative");
  if (!(kappa >= 0.0 && kappa <= 1.0)) fail(ErrorKind::InvalidInput, "quasimomentum must lie in [0, 1]");
  if (!(q0 >= 0.0)) fail(ErrorKind::InvalidInput, "q0 must be non-negative");
  int M = std::max(64, n + kMinTruncation);
  auto at = [&](int trunc) {
    std::vector<double> diag, off;
    fill_tridiagonal(kappa, q0, trunc, diag, off);
    return kth_eigenvalue(diag, off, n);
  };
  double previous = at(M);
  while (2 * M <= kMaxTruncation) {
    M *= 2;
    const double current = at(M);
    if (std::abs(current - previous) <= kConvergenceTol * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  fail(ErrorKind::Convergence, "band energy not converged");
}

double folded_order(int n, double kappa) {
  return (n % 2 == 0) ? n + kappa : n + 1.0 - kappa;
}

std::vector<BandPoint> band_structure(int bands, int kappa_points, double q0) {
  if (bands < 1 || kappa_points < 2) fail(ErrorKind::InvalidInput, "need at least one band and two kappa points");
  std::vector<BandPoint> out;
  out.reserve(static_cast<std::size_t>(bands) * kappa_points);
  for (int n = 0; n < bands; ++n) {
    for (int i = 0; i < kappa_points; ++i) {
      const double kappa = static_cast<double>(i) / (kappa_points - 1);
      out.push_back({n, kappa, band_energy(n, kappa, q0)});
    }
  }
  return out;
}

double mean_band_separation(double q0, int quadrature_points) {
  if (quadrature_points < 1) fail(ErrorKind::InvalidInput, "quadrature needs at least one point");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(quadrature_points);
  double sum = 0.0;
  for (int i = 0; i < quadrature_points; ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &x, &w, table);
    sum += w * (band_energy(1, x, q0) - band_energy(0, x, q0));
  }
  gsl_integration_glfixed_table_free(table);
  return sum;
}

BandEdgeGaps band_edge_gaps(double q0, int quadrature_points) {
  BandEdgeGaps g;
  g.at_zone_center = band_energy(1, 0.0, q0) - band_energy(0, 0.0, q0);
  g.at_zone_edge = band_energy(1, 1.0, q0) - band_energy(0, 1.0, q0);
  g.kappa_average = mean_band_separation(q0, quadrature_points);
  return g;
}

Spectrum spectrum(double nu, double q, int truncation) {
  const auto [nu_r, shift] = reduce_order(nu);
  const int M = effective_truncation(truncation, shift);
  std::vector<double> diag, off;
  fill_tridiagonal(nu_r, q, M, diag, off);
  Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(off.data(), static_cast<Eigen::Index>(off.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Convergence, "tridiagonal eigensolver did not converge");
  return Spectrum{nu_r, q, M, solver.eigenvalues(), solver.eigenvectors()};
}

double well_dipole(int n, double q0, int truncation) {
  if (n < 0) fail(ErrorKind::InvalidInput, "level index must be non-negative");
  const Spectrum s = spectrum(0.0, q0, std::max(truncation, n + kMinTruncation));
  const Eigen::Index dim = s.values.size();
  const Eigen::VectorXd lo = s.vectors.col(n);
  const Eigen::VectorXd hi = s.vectors.col(n + 1);
  // ∫₀^π e^{2i(m'-m)z} (z - π/2) dz / π = -i / (2(m'-m)) for m' ≠ m, 0 otherwise.
  double acc = 0.0;
  for (Eigen::Index a = 0; a < dim; ++a) {
    if (lo[a] == 0.0) continue;
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (a == b) continue;
      acc += lo[a] * hi[b] / (2.0 * static_cast<double>(b - a));
    }
  }
  // Truncation check: the highest retained modes must carry negligible weight.
  const double tail = std::abs(lo[0]) + std::abs(lo[dim - 1]) + std::abs(hi[0]) + std::abs(hi[dim - 1]);
  if (tail > 1e-10) fail(ErrorKind::Convergence, "well dipole eigenvectors not converged at this truncation");
  return std::abs(acc);
}

double CharValueCache::get(const MathieuQuery& query) {
  const Key key{query.order_nu, query.q, query.truncation};
  {
    std::shared_lock lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
  }
  const double value = char_value(query);
  std::unique_lock lock(mutex_);
  values_.emplace(key, value);
  return value;
}

std::size_t CharValueCache::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

void CharValueCache::clear() {
  std::unique_lock lock(mutex_);
  values_.clear();
}

}  // namespace latrev::mathieu
