#include "subspace.hpp"

#include <cmath>

namespace afa {

OmpResult omp_column(const Eigen::MatrixXd& atoms,
                     const Eigen::VectorXd& target, int psi, double tau) {
  if (psi < 1) throw ConfigError("omp_column: psi must be >= 1");
  if (tau < 0) throw ConfigError("omp_column: tau must be >= 0");
  const int n = int(atoms.rows());
  const int m = int(atoms.cols());
  if (target.size() != n) throw DataError("omp_column: dimension mismatch");

  OmpResult res;
  res.coeffs = Eigen::VectorXd::Zero(m);
  double target_norm = target.norm();
  res.residual_norm = target_norm;
  if (m == 0 || target_norm == 0.0) return res;

  int cap = std::min(std::min(psi, m), n);
  // Thin QR of the selected atoms, extended one column at a time.
  Eigen::MatrixXd Q(n, cap);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(cap, cap);
  Eigen::VectorXd r = target;
  std::vector<char> used(m, 0);

  while (int(res.support.size()) < cap) {
    int best = -1;
    double best_corr = 0.0;
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      double c = std::abs(atoms.col(j).dot(r));
      if (c > best_corr) {
        best_corr = c;
        best = j;
      }
    }
    // All remaining correlations are zero: the residual is orthogonal to
    // every unused atom and no further progress is possible.
    if (best < 0 || best_corr <= 1e-14 * target_norm) break;

    int k = int(res.support.size());
    Eigen::VectorXd v = atoms.col(best);
    for (int i = 0; i < k; ++i) {
      double proj = Q.col(i).dot(v);
      R(i, k) = proj;
      v -= proj * Q.col(i);
    }
    double vnorm = v.norm();
    if (vnorm <= 1e-12 * std::max(1.0, atoms.col(best).norm())) {
      // Linearly dependent on the current support; nothing new to add.
      used[best] = 1;
      continue;
    }
    Q.col(k) = v / vnorm;
    R(k, k) = vnorm;
    used[best] = 1;
    res.support.push_back(best);

    // Least squares on the support: R c = Q^T target, then fresh residual.
    int sz = k + 1;
    Eigen::VectorXd rhs = Q.leftCols(sz).transpose() * target;
    Eigen::VectorXd c =
        R.topLeftCorner(sz, sz).triangularView<Eigen::Upper>().solve(rhs);
    r = target - Q.leftCols(sz) * rhs;
    res.residual_norm = r.norm();
    res.coeffs.setZero();
    for (int i = 0; i < sz; ++i) res.coeffs[res.support[i]] = c[i];
    if (res.residual_norm <= tau * target_norm) break;
  }
  return res;
}

Eigen::MatrixXd spr_matrix(const Eigen::MatrixXd& features, int psi,
                           double tau) {
  const int n = int(features.cols());
  if (n < 2) throw DataError("spr_matrix: need at least two feature columns");
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd atoms(features.rows(), n - 1);
  for (int j = 0; j < n; ++j) {
    // Atoms are all columns except j, preserving relative order.
    if (j > 0) atoms.leftCols(j) = features.leftCols(j);
    if (j + 1 < n)
      atoms.rightCols(n - 1 - j) = features.rightCols(n - 1 - j);
    OmpResult r = omp_column(atoms, features.col(j), psi, tau);
    for (int i = 0; i < n - 1; ++i) {
      int row = i < j ? i : i + 1;
      C(row, j) = r.coeffs[i];
    }
  }
  return C;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& coeffs) {
  return coeffs.cwiseAbs() + coeffs.transpose().cwiseAbs();
}

}  // namespace afa
