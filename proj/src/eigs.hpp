// Shared numerical kit: symmetric eigensolvers and seeded k-means.
//
// Dense problems go through Eigen's tridiagonalising solver.  Larger sparse
// problems use Lanczos with full reorthogonalisation for the top (largest
// algebraic) eigenpairs; every accepted pair satisfies
// ||A v - lambda v|| <= tol * ||A||.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "common.hpp"

namespace afa {

struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column i pairs with values[i]
};

SymEig sym_eig_dense(const Eigen::MatrixXd& A);

// Top-k eigenpairs of a symmetric sparse matrix, values descending.
// Falls back to the dense path when the problem is small or k is close to n.
SymEig sym_eig_topk(const Eigen::SparseMatrix<double>& A, int k, uint64_t seed,
                    double tol = 1e-10);

struct KmeansResult {
  std::vector<int32_t> labels;
  Eigen::MatrixXd centers;  // k x d
  double inertia = 0.0;
  int iterations = 0;
};

// Seeded k-means++ followed by Lloyd iterations on row-vector points.
// Deterministic: distance ties pick the lowest centre index, empty clusters
// are reseeded from the farthest point.  A single initialisation is run.
KmeansResult kmeans(const Eigen::MatrixXd& points, int k, uint64_t seed,
                    int max_iter = 300);

}  // namespace afa
