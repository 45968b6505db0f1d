#include "cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace afa {

PairwiseSimilarity PairwiseSimilarity::from_matrix(Eigen::MatrixXd S,
                                                   double preference) {
  AFA_CHECK(S.rows() == S.cols(), "similarity matrix not square");
  PairwiseSimilarity out;
  out.preference = preference;
  for (int i = 0; i < S.rows(); ++i) S(i, i) = preference;
  out.S = std::move(S);
  return out;
}

PairwiseSimilarity similarity(const Eigen::MatrixXd& features, double e,
                              double g) {
  const int n = int(features.cols());
  if (n < 1) throw DataError("similarity: empty feature matrix");
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);

  // Prefix sums of consecutive distances give every path segment in O(1).
  std::vector<double> prefix(n, 0.0);
  for (int x = 0; x + 1 < n; ++x)
    prefix[x + 1] =
        prefix[x] + (features.col(x) - features.col(x + 1)).norm();

  std::vector<double> offdiag;
  offdiag.reserve(size_t(n) * (n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double direct = (features.col(i) - features.col(j)).norm();
      double path = prefix[j] - prefix[i];
      double val = -std::sqrt(std::pow(direct, e) + std::pow(path, g));
      S(i, j) = val;
      S(j, i) = val;
      offdiag.push_back(val);
      offdiag.push_back(val);
    }
  }
  double pref = 0.0;
  if (!offdiag.empty()) {
    std::sort(offdiag.begin(), offdiag.end());
    size_t m = offdiag.size();
    pref = (m % 2 == 1) ? offdiag[m / 2]
                        : 0.5 * (offdiag[m / 2 - 1] + offdiag[m / 2]);
  }
  return PairwiseSimilarity::from_matrix(std::move(S), pref);
}

ApcResult affinity_propagation(const PairwiseSimilarity& sim, double damping,
                               int max_iter, int conv_window) {
  if (!(damping >= 0.0 && damping < 1.0))
    throw ConfigError("affinity_propagation: damping must lie in [0,1)");
  if (max_iter < 1 || conv_window < 1)
    throw ConfigError("affinity_propagation: bad iteration limits");
  const int n = int(sim.S.rows());
  AFA_CHECK(sim.S.cols() == n, "affinity_propagation: S not square");

  ApcResult res;
  if (n == 1) {
    res.exemplars = {0};
    res.labels = {0};
    res.num_clusters = 1;
    res.converged = true;
    res.iterations = 0;
    return res;
  }

  // Deterministic degeneracy-breaking jitter; without it, exactly
  // symmetric instances (duplicate points) park r(k,k)+a(k,k) on a knife
  // edge and the exemplar set never settles.
  Eigen::MatrixXd S = sim.S;
  SplitMix64 jitter(0x5eedULL);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S(i, j) += (1e-12 * std::abs(S(i, j)) + 1e-300) * jitter.next_double();

  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  std::vector<char> is_exemplar(n, 0), prev_exemplar(n, 0);
  int stable = 0;

  for (int iter = 0; iter < max_iter; ++iter) {
    // Responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k')).
    for (int i = 0; i < n; ++i) {
      double max1 = -std::numeric_limits<double>::infinity();
      double max2 = max1;
      int arg1 = -1;
      for (int k = 0; k < n; ++k) {
        double v = A(i, k) + S(i, k);
        if (v > max1) {
          max2 = max1;
          max1 = v;
          arg1 = k;
        } else if (v > max2) {
          max2 = v;
        }
      }
      for (int k = 0; k < n; ++k) {
        double cutoff = (k == arg1) ? max2 : max1;
        R(i, k) = damping * R(i, k) + (1.0 - damping) * (S(i, k) - cutoff);
      }
    }
    // Availabilities: a(i,k) = min(0, r(k,k) + sum_{i' != i,k} max(0, r(i',k)))
    // and a(k,k) = sum_{i' != k} max(0, r(i',k)).
    for (int k = 0; k < n; ++k) {
      double pos_sum = 0.0;
      for (int i = 0; i < n; ++i)
        if (i != k) pos_sum += std::max(0.0, R(i, k));
      for (int i = 0; i < n; ++i) {
        double value;
        if (i == k) {
          value = pos_sum;
        } else {
          value = std::min(0.0, R(k, k) + pos_sum - std::max(0.0, R(i, k)));
        }
        A(i, k) = damping * A(i, k) + (1.0 - damping) * value;
      }
    }
    res.iterations = iter + 1;

    for (int k = 0; k < n; ++k)
      is_exemplar[k] = (R(k, k) + A(k, k) > 0.0) ? 1 : 0;
    if (is_exemplar == prev_exemplar &&
        std::count(is_exemplar.begin(), is_exemplar.end(), 1) > 0) {
      if (++stable >= conv_window) {
        res.converged = true;
        break;
      }
    } else {
      stable = 0;
    }
    prev_exemplar = is_exemplar;
  }

  for (int k = 0; k < n; ++k)
    if (is_exemplar[k]) res.exemplars.push_back(k);
  if (res.exemplars.empty()) {
    // Degenerate instance (all-identical input, or no convergence signal):
    // fall back to the strongest single candidate.
    int best = 0;
    double best_val = R(0, 0) + A(0, 0);
    for (int k = 1; k < n; ++k) {
      double v = R(k, k) + A(k, k);
      if (v > best_val) {
        best_val = v;
        best = k;
      }
    }
    res.exemplars.push_back(best);
  }

  res.num_clusters = int(res.exemplars.size());
  res.labels.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < res.num_clusters; ++c) {
      double v = S(i, res.exemplars[c]);
      if (v > best_val) {
        best_val = v;
        best = c;
      }
    }
    res.labels[i] = best;
  }
  // Exemplars always belong to their own cluster.
  for (int c = 0; c < res.num_clusters; ++c) res.labels[res.exemplars[c]] = c;
  return res;
}

ClusterAssignment spectral_cluster(const Eigen::MatrixXd& affinity, int K,
                                   uint64_t seed) {
  const int n = int(affinity.rows());
  AFA_CHECK(affinity.cols() == n, "spectral_cluster: affinity not square");
  if (K < 1) throw ConfigError("spectral_cluster: K must be >= 1");

  Eigen::VectorXd degree = affinity.rowwise().sum();
  std::vector<int> active;   // rows entering the embedding
  std::vector<int> isolated; // zero-degree rows become singleton clusters
  for (int i = 0; i < n; ++i) {
    if (degree[i] > 0.0)
      active.push_back(i);
    else
      isolated.push_back(i);
  }

  ClusterAssignment out;
  out.labels.assign(n, 0);
  int next_label = 0;
  for (int i : isolated) out.labels[i] = next_label++;

  if (!active.empty()) {
    int m = int(active.size());
    int k_active = std::max(1, std::min(K - int(isolated.size()), m));
    Eigen::MatrixXd M(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) M(a, b) = affinity(active[a], active[b]);
    Eigen::VectorXd dsqrt =
        M.rowwise().sum().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd N = dsqrt.asDiagonal() * M * dsqrt.asDiagonal();
    // Symmetrise away the multiplication round-off before eigensolving.
    N = 0.5 * (N + N.transpose()).eval();

    SymEig eig = sym_eig_dense(N);
    Eigen::MatrixXd embed(m, k_active);
    for (int c = 0; c < k_active; ++c)
      embed.col(c) = eig.vectors.col(m - 1 - c);
    for (int r = 0; r < m; ++r) {
      double norm = embed.row(r).norm();
      if (norm > 0.0) embed.row(r) /= norm;
    }
    KmeansResult km = kmeans(embed, k_active, seed);
    for (int r = 0; r < m; ++r) out.labels[active[r]] = next_label + km.labels[r];
  }

  out.num_clusters = relabel_dense(out.labels);
  return out;
}

std::vector<int> select_global_nodes(const ClusterAssignment& assign,
                                     NodeRule rule) {
  const int n = int(assign.labels.size());
  if (n == 0) throw DataError("select_global_nodes: empty assignment");
  std::vector<int64_t> sizes(assign.num_clusters, 0);
  for (int32_t l : assign.labels) sizes[l]++;

  std::vector<char> keep(assign.num_clusters, 0);
  switch (rule) {
    case NodeRule::kSizeWindow: {
      int64_t hi = (n + 1) / 2;  // ceil(N/2)
      for (int c = 0; c < assign.num_clusters; ++c)
        keep[c] = (sizes[c] >= 2 && sizes[c] <= hi) ? 1 : 0;
      break;
    }
    case NodeRule::kAllClusters:
      std::fill(keep.begin(), keep.end(), 1);
      break;
    case NodeRule::kLargestExcluded: {
      std::fill(keep.begin(), keep.end(), 1);
      if (assign.num_clusters > 1) {
        int largest = 0;
        for (int c = 1; c < assign.num_clusters; ++c)
          if (sizes[c] > sizes[largest]) largest = c;
        keep[largest] = 0;
      }
      break;
    }
  }
  if (std::count(keep.begin(), keep.end(), 1) == 0) {
    // Empty selection: fall back to the largest cluster, lowest id on ties.
    int largest = 0;
    for (int c = 1; c < assign.num_clusters; ++c)
      if (sizes[c] > sizes[largest]) largest = c;
    keep[largest] = 1;
  }

  std::vector<int> nodes;
  for (int i = 0; i < n; ++i)
    if (keep[assign.labels[i]]) nodes.push_back(i);
  return nodes;
}

}  // namespace afa
