#pragma once

#include <map>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include <Eigen/Core>

namespace latrev::mathieu {

// Characteristic-value query for y'' + (a - 2q cos 2x) y = 0 with a solution
// e^{iνx} P(x), P π-periodic.
struct MathieuQuery {
  double order_nu = 0.0;
  double q = 0.0;
  int truncation = 64;  // Fourier half-size M; basis e^{i(ν+2m)x}, |m| ≤ M
};

inline constexpr int kMinTruncation = 8;
inline constexpr int kMaxTruncation = 1024;
inline constexpr double kConvergenceTol = 1e-12;

// a_ν(q). Starts at query.truncation and doubles until two successive
// truncations agree to kConvergenceTol (relative, floor 1), capped at
// kMaxTruncation. Throws Error{Convergence} otherwise.
//
// The branch is the eigenvalue continuously connected to ν² at q = 0. For
// integer ν ≥ 1 that is the upper member of the degenerate pair, i.e. the
// even-type a_r rather than b_r. A real symmetric tridiagonal matrix with
// non-zero off-diagonals has a simple spectrum, so the sorted position of
// this branch is fixed for all q > 0 and equals its rank at q = 0.
double char_value(const MathieuQuery& query);
double char_value(double nu, double q);

// The value at one fixed truncation, no convergence loop.
double char_value_at_truncation(double nu, double q, int truncation);

// Sorted position of the ν branch inside the reduced-order Fourier matrix.
int branch_rank(double nu, int truncation);

// ν² + q²/(2(ν²-1)). Throws Error{Regime} when |ν - 1| < 0.1.
double char_value_small_q(double nu, double q);

// -2q + 2s√q - (s²+1)/8 for odd s = 2n+1. Throws Error{Regime} for q < 5.
double char_value_large_q(int s, double q);

struct BandPoint {
  int band_index = 0;
  double quasimomentum = 0.0;  // κ in units of k_L, [0,1]
  double energy = 0.0;         // E_r
};

// Energy of band n at quasimomentum κ for the potential 2q₀cos2z in recoil
// units: the n-th sorted eigenvalue of the order-κ operator.
double band_energy(int n, double kappa, double q0);

// Order ν whose characteristic value equals band n at κ: ν = n + κ for even
// n, n + 1 - κ for odd n (reduced-zone folding).
double folded_order(int n, double kappa);

std::vector<BandPoint> band_structure(int bands, int kappa_points, double q0);

// κ-average over [0,1] of E₁(κ) - E₀(κ) by Gauss-Legendre quadrature.
double mean_band_separation(double q0, int quadrature_points = 64);

struct BandEdgeGaps {
  double at_zone_center = 0.0;  // E₁(0) - E₀(0)
  double at_zone_edge = 0.0;    // E₁(1) - E₀(1)
  double kappa_average = 0.0;
};
BandEdgeGaps band_edge_gaps(double q0, int quadrature_points = 64);

// Eigenpairs of the order-ν Fourier matrix at one truncation, sorted
// ascending. Column j of `vectors` is the coefficient vector over m = -M..M.
struct Spectrum {
  double nu = 0.0;
  double q = 0.0;
  int truncation = 0;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
Spectrum spectrum(double nu, double q, int truncation);

// Dipole element |⟨n|z - π/2|n+1⟩| between the κ = 0 Bloch states of bands n
// and n+1, with z restricted to the well centred at π/2.
double well_dipole(int n, double q0, int truncation = 64);

// Memo cache for char_value; safe for concurrent readers and writers.
class CharValueCache {
 public:
  double get(const MathieuQuery& query);
  std::size_t size() const;
  void clear();

 private:
  using Key = std::tuple<double, double, int>;
  mutable std::shared_mutex mutex_;
  std::map<Key, double> values_;
};

}  // namespace latrev::mathieu
