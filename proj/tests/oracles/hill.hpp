#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

// Dense reference eigensolves for the Mathieu recursion, used only by tests.
namespace oracle {

// Full (2M+1)² matrix of y'' + (a - 2q cos 2x) y = 0 in the basis e^{i(ν+2m)x}.
inline Eigen::MatrixXd hill_matrix(double nu, double q, int M) {
  const int n = 2 * M + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double k = nu + 2.0 * (i - M);
    h(i, i) = k * k;
    if (i + 1 < n) {
      h(i, i + 1) = q;
      h(i + 1, i) = q;
    }
  }
  return h;
}

inline double lowest(double nu, double q, int M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hill_matrix(nu, q, M), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double sorted_eigenvalue(double nu, double q, int M, int index) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hill_matrix(nu, q, M), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(index);
}

// Follows the eigenvector that starts as the plane wave e^{iνx} from q = 0 to
// q in small steps, picking the largest overlap each time.
inline double continued_branch(double nu, double q, int M, int steps = 400) {
  const int n = 2 * M + 1;
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
  prev(M) = 1.0;
  double value = nu * nu;
  for (int s = 1; s <= steps; ++s) {
    const double qs = q * s / steps;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hill_matrix(nu, qs, M));
    Eigen::Index best = 0;
    (es.eigenvectors().transpose() * prev).cwiseAbs().maxCoeff(&best);
    prev = es.eigenvectors().col(best);
    value = es.eigenvalues()(best);
  }
  return value;
}

}  // namespace oracle
