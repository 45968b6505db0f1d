// Slow, direct re-implementations used to cross-check the library's
// optimised paths.  Everything here favours obviousness over speed:
// explicit pair loops, materialised pixel sets, textbook message updates,
// dense solves.  Nothing in this file shares code with src/.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "imgio.hpp"

namespace testref {

// Rand index of seg against one annotation by enumerating all unordered
// pixel pairs.
double pri_pairs(const afa::LabelMap& seg, const afa::LabelMap& truth);

// Variation of information from the joint label histogram, p*log(p) term
// by term.
double voi_direct(const afa::LabelMap& a, const afa::LabelMap& b, bool bits);

// Global consistency error with materialised region pixel sets and
// per-pixel set differences.
double gce_sets(const afa::LabelMap& a, const afa::LabelMap& b);

// Boundary displacement error with an all-pairs nearest-boundary scan.
// Boundary convention: a pixel whose right or bottom neighbour differs;
// a single-label map contributes the image border instead.
double bde_scan(const afa::LabelMap& a, const afa::LabelMap& b);

// Greedy orthogonal matching pursuit with explicit correlation loops and
// normal-equation refits.  Ties pick the lowest atom index; stops at psi
// atoms or ||r|| <= tau * ||target||.  residual_trace, when given, records
// ||r|| after every refit.
Eigen::VectorXd omp_greedy(const Eigen::MatrixXd& atoms,
                           const Eigen::VectorXd& target, int psi, double tau,
                           std::vector<double>* residual_trace = nullptr);

// Smallest residual achievable by least squares on any atom subset of size
// <= max_atoms (exhaustive search; keep the atom count tiny).
double best_subset_residual(const Eigen::MatrixXd& atoms,
                            const Eigen::VectorXd& target, int max_atoms);

struct ApcPlain {
  std::vector<int> exemplars;   // ascending
  std::vector<int32_t> labels;  // exemplar order
};

// Textbook affinity propagation: per-entry max loops, no running-max
// shortcuts.  Applies the same deterministic degeneracy-breaking jitter
// the library documents (seed 0x5eed, relative magnitude 1e-12) so exact
// comparison is meaningful.  `s` must already carry the preference on its
// diagonal.
ApcPlain apc_plain(const Eigen::MatrixXd& s, double damping, int max_iter,
                   int conv_window);

// Greedy graph-based oversegmentation re-implemented with a plain
// quadratic union-find: 8-connected Lab edges sorted by (weight, source,
// target), adaptive threshold k/|C|, ascending small-component merge.
// No pre-smoothing; pass an already-smoothed image when needed.
afa::LabelMap fh_plain(const afa::Image& image, double k, int min_size);

struct BatchLowRank {
  Eigen::MatrixXd D;  // n x d
  Eigen::MatrixXd U;  // N x d
  Eigen::MatrixXd V;  // N x d
  double objective = 0.0;
  int iterations = 0;
};

// The regularised low-rank objective
//   lambda1/2 ||F - D V^T||^2 + 1/2 (||U||^2 + ||V||^2)
//     + lambda2/2 ||D - F U||^2
// evaluated directly.
double lowrank_objective(const Eigen::MatrixXd& f, const Eigen::MatrixXd& d,
                         const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                         double lambda1, double lambda2);

// Full-data alternating minimisation of the same objective: closed-form
// V, U, and D steps repeated until the objective stalls.
BatchLowRank batch_lowrank(const Eigen::MatrixXd& f, int d, double lambda1,
                           double lambda2, int max_iter = 200,
                           double rel_tol = 1e-10);

struct NcutFull {
  std::vector<int32_t> labels;  // first embed_rows nodes of the X side
  Eigen::VectorXd eigenvalues;  // k smallest of the full graph, ascending
  double gap_after_k = 0.0;     // eigenvalue k+1 minus eigenvalue k
};

// Normalised cut of the full (X+Y) graph induced by a bipartite weight
// matrix, solved densely: eigenvectors of the symmetric normalised
// Laplacian, D-weighted normalisation, row-normalised embedding of the
// first embed_rows X nodes, then the library k-means (shared primitive,
// unit-tested on its own) with the caller's seed.
NcutFull ncut_full(const Eigen::MatrixXd& b, int k, uint64_t kmeans_seed,
                   int embed_rows);

// Fraction of positions where `a` equals `b` under the best label
// permutation (brute force; k <= 6).
double perm_accuracy(const std::vector<int32_t>& a,
                     const std::vector<int32_t>& b);

}  // namespace testref
