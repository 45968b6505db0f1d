// Per-scale affinity graphs and the bipartite partition.
//
// Each scale gets a local adjacency graph: every superpixel is regressed
// onto its spatial neighbours and pairwise reconstruction errors become
// edge weights.  Global-node pairs are then overwritten with the rescaled
// low-rank representation weights.  All scales are stitched into one
// bipartite graph between (pixels + superpixels) and superpixels, which is
// partitioned by solving the small side's generalised eigenproblem and
// transferring the eigenvectors back to the pixels.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "eigs.hpp"
#include "superpixel.hpp"

namespace afa {

enum class AffinityKernel { kLinear, kGaussian };

// Adjacency graph over one scale.  Off-diagonal entries exist only for
// spatially adjacent pairs; the diagonal is 1.  Features are rescaled by
// the scale's maximum column norm before the neighbour regressions, and the
// linear kernel clamps 1 - (r_ij + r_ji)/2 at zero.  The Gaussian kernel
// uses exp(-(r_ij + r_ji) / (2 * 20^2)).
Eigen::MatrixXd adjacency_graph(const SuperpixelScale& scale,
                                const Eigen::MatrixXd& features,
                                AffinityKernel kernel = AffinityKernel::kLinear);

// Replaces entries at distinct global-node pairs with the low-rank weights
// rescaled to a maximum entry of 1.  Idempotent for fixed (W, nodes).
Eigen::MatrixXd fuse(const Eigen::MatrixXd& adjacency,
                     const Eigen::MatrixXd& w, const std::vector<int>& nodes);

// Bipartite graph: X = pixels then superpixels of every scale, Y =
// superpixels of every scale.  Pixels connect to their containing
// superpixel at each scale with weight beta; superpixel X nodes carry their
// scale's fused affinity rows (nonzero entries only).
Eigen::SparseMatrix<double> bipartite(
    const ScaleStack& stack, const std::vector<Eigen::MatrixXd>& graphs,
    double beta);

struct TcutResult {
  std::vector<int32_t> labels;   // for the first embed_rows X nodes, dense
  int num_labels = 0;
  int k_used = 0;                // may be reduced for degenerate graphs
  Eigen::VectorXd eigenvalues;   // ascending full-graph Laplacian values
  Eigen::MatrixXd embedding;     // embed_rows x k_used, before row-normalise
};

// Reusable transfer-cut state for one bipartite graph.  Construction builds
// W_Y = B^T D_X^{-1} B and its symmetric normalisation once; partitions at
// different group counts then share the cached eigenpairs, so a k_T sweep
// pays for a single eigensolve (call prepare() with the sweep upper bound
// first, otherwise the cache grows on demand).
class TcutContext {
 public:
  explicit TcutContext(const Eigen::SparseMatrix<double>& b);

  // Ensures the eigenpair cache covers partitions up to k_max groups.
  void prepare(int k_max, uint64_t seed) const;

  // Transfer cut at k_t groups.  Solves the Y-side eigenproblem
  // W_Y z = mu D_Y z, maps each mu to the equivalent full-graph Laplacian
  // eigenvalue 1 - sqrt(mu), transfers the eigenvectors to X, and
  // k-means-clusters the row-normalised embedding of the first embed_rows
  // X nodes (all of them when embed_rows < 0).
  TcutResult partition(int k_t, uint64_t seed, int embed_rows = -1) const;

  int active_count() const { return na_; }

 private:
  int nx_ = 0;
  int ny_ = 0;
  int na_ = 0;                        // Y nodes with nonzero degree
  Eigen::VectorXd dx_, dx_inv_;
  Eigen::VectorXd da_, da_isqrt_;     // degrees of the active Y nodes
  Eigen::SparseMatrix<double> ba_;    // B restricted to active columns
  Eigen::SparseMatrix<double> nrm_sym_;
  mutable SymEig eig_;
  mutable int eig_k_ = 0;
  mutable uint64_t eig_seed_ = 0;
  mutable bool eig_valid_ = false;
};

// One-shot transfer cut; equivalent to TcutContext(b).partition(...).
TcutResult tcut(const Eigen::SparseMatrix<double>& b, int k_t, uint64_t seed,
                int embed_rows = -1);

}  // namespace afa
