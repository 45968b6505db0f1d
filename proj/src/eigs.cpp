#include "eigs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace afa {

SymEig sym_eig_dense(const Eigen::MatrixXd& A) {
  AFA_CHECK(A.rows() == A.cols(), "sym_eig_dense: matrix not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  AFA_CHECK(solver.info() == Eigen::Success, "sym_eig_dense: no convergence");
  SymEig out;
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

namespace {

SymEig topk_from_dense(const Eigen::MatrixXd& A, int k) {
  SymEig full = sym_eig_dense(A);
  int n = int(A.rows());
  SymEig out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    out.values[i] = full.values[n - 1 - i];
    out.vectors.col(i) = full.vectors.col(n - 1 - i);
  }
  return out;
}

}  // namespace

SymEig sym_eig_topk(const Eigen::SparseMatrix<double>& A, int k, uint64_t seed,
                    double tol) {
  const int n = int(A.rows());
  AFA_CHECK(A.cols() == n, "sym_eig_topk: matrix not square");
  AFA_CHECK(k >= 1 && k <= n, "sym_eig_topk: bad k");
  if (n <= 256 || k * 3 >= n) return topk_from_dense(Eigen::MatrixXd(A), k);

  double scale = 0.0;
  for (int c = 0; c < A.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  if (scale == 0.0) scale = 1.0;

  SplitMix64 rng(seed);
  int m = std::min(n, std::max(6 * k + 60, 120));
  while (true) {
    Eigen::MatrixXd Q(n, m + 1);
    Eigen::VectorXd alpha(m), beta(m);
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.next_double() - 0.5;
    q.normalize();
    Q.col(0) = q;
    int steps = 0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w = A * Q.col(j);
      alpha[j] = Q.col(j).dot(w);
      w -= alpha[j] * Q.col(j);
      if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
      // Full reorthogonalisation, twice for stability.
      for (int pass = 0; pass < 2; ++pass)
        w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
      double b = w.norm();
      steps = j + 1;
      if (b <= 1e-12 * scale) {
        // Invariant subspace reached; restart directions are exhausted.
        beta[j] = 0.0;
        break;
      }
      beta[j] = b;
      Q.col(j + 1) = w / b;
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < steps) {
        T(i, i + 1) = beta[i];
        T(i + 1, i) = beta[i];
      }
    }
    SymEig ritz = sym_eig_dense(T);
    if (steps >= k) {
      SymEig out;
      out.values.resize(k);
      out.vectors.resize(n, k);
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        double theta = ritz.values[steps - 1 - i];
        Eigen::VectorXd y = ritz.vectors.col(steps - 1 - i);
        Eigen::VectorXd v = Q.leftCols(steps) * y;
        v.normalize();
        double resid = (A * v - theta * v).norm();
        if (resid > tol * scale) {
          ok = false;
          break;
        }
        out.values[i] = theta;
        out.vectors.col(i) = v;
      }
      if (ok) return out;
    }
    if (m >= n) return topk_from_dense(Eigen::MatrixXd(A), k);
    m = std::min(n, 2 * m);
  }
}

KmeansResult kmeans(const Eigen::MatrixXd& points, int k, uint64_t seed,
                    int max_iter) {
  const int n = int(points.rows());
  const int d = int(points.cols());
  AFA_CHECK(n >= 1, "kmeans: no points");
  if (k < 1) throw ConfigError("kmeans: k must be >= 1");
  k = std::min(k, n);

  SplitMix64 rng(seed);
  Eigen::MatrixXd centers(k, d);
  // k-means++ seeding on squared distances.
  int first = int(rng.next_u64() % uint64_t(n));
  centers.row(0) = points.row(first);
  Eigen::VectorXd dist2 =
      (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = dist2.sum();
    int pick = 0;
    if (total > 0.0) {
      double target = rng.next_double() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = int(rng.next_u64() % uint64_t(n));
    }
    centers.row(c) = points.row(pick);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int32_t> labels(n, 0);
  Eigen::VectorXd center_sq(k);
  KmeansResult result;
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment via ||p||^2 - 2 p.c + ||c||^2; ties take the lowest index.
    center_sq = centers.rowwise().squaredNorm();
    Eigen::MatrixXd cross = points * centers.transpose();  // n x k
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_val = center_sq[0] - 2.0 * cross(i, 0);
      for (int c = 1; c < k; ++c) {
        double val = center_sq[c] - 2.0 * cross(i, c);
        if (val < best_val) {
          best_val = val;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    result.iterations = iter + 1;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::vector<int64_t> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += points.row(i);
      counts[labels[i]]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / double(counts[c]);
      } else {
        // Reseed an empty cluster from the point farthest from its centre.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          double dd = (points.row(i) - centers.row(labels[i])).squaredNorm();
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
        labels[far] = c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
  }

  result.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    result.inertia += (points.row(i) - centers.row(labels[i])).squaredNorm();
  result.labels = std::move(labels);
  result.centers = std::move(centers);
  return result;
}

}  // namespace afa
