// Global-node selection machinery: the path-aware similarity over the
// superpixel sequence, exemplar-based affinity propagation (used only for
// its cluster count), normalised spectral clustering of the symmetrised
// self-representation affinity, and the size-window rule that picks which
// clusters become global nodes.
#pragma once

#include <Eigen/Dense>

#include "eigs.hpp"

namespace afa {

struct PairwiseSimilarity {
  Eigen::MatrixXd S;         // symmetric, nonpositive off the diagonal
  double preference = 0.0;   // shared diagonal value

  static PairwiseSimilarity from_matrix(Eigen::MatrixXd S, double preference);
};

// Similarity between superpixels i < j combines the direct feature distance
// (exponent e) with the accumulated distance along the index path from i to
// j (exponent g):  S(i,j) = -sqrt(|d(i,j)|^e + |sum path steps|^g).
// The diagonal carries the preference, set to the median off-diagonal value.
PairwiseSimilarity similarity(const Eigen::MatrixXd& features, double e,
                              double g);

struct ApcResult {
  std::vector<int> exemplars;     // ascending superpixel indices
  std::vector<int32_t> labels;    // dense cluster ids, exemplar order
  int num_clusters = 0;
  int iterations = 0;
  bool converged = false;
};

// Frey-Dueck affinity propagation with damped messages.  A deterministic
// seeded jitter (relative magnitude 1e-12) is folded into S to break the
// exact-tie degeneracies the message equations cannot resolve.  The result
// depends only on (S, damping, max_iter, conv_window).
ApcResult affinity_propagation(const PairwiseSimilarity& sim, double damping,
                               int max_iter = 1000, int conv_window = 50);

struct ClusterAssignment {
  std::vector<int32_t> labels;  // dense 0-based
  int num_clusters = 0;
};

// Normalised spectral clustering of a symmetric nonnegative affinity:
// embed by the top-K eigenvectors of D^{-1/2} M D^{-1/2}, row-normalise,
// then seeded k-means.  Zero-degree rows are split off as singleton
// clusters first and do not enter the embedding.
ClusterAssignment spectral_cluster(const Eigen::MatrixXd& affinity, int K,
                                   uint64_t seed);

enum class NodeRule { kSizeWindow, kAllClusters, kLargestExcluded };

// Global nodes from a cluster assignment.  The size-window rule keeps the
// union of clusters with 2 <= size <= ceil(N/2) and falls back to the
// largest cluster (lowest id on ties) when the window is empty.
std::vector<int> select_global_nodes(const ClusterAssignment& assign,
                                     NodeRule rule = NodeRule::kSizeWindow);

}  // namespace afa
