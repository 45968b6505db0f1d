// Sparse self-representation by orthogonal matching pursuit.
//
// Every feature column is greedily decomposed over the remaining columns:
// pick the atom with the largest absolute correlation to the residual
// (lowest index on ties), refit by least squares through an incrementally
// extended QR factorisation, and stop at `psi` atoms or once the residual
// drops below tau * ||target||.
#pragma once

#include <Eigen/Dense>

#include "common.hpp"

namespace afa {

struct OmpResult {
  Eigen::VectorXd coeffs;    // dense representation, size = atom count
  std::vector<int> support;  // atoms in selection order
  double residual_norm = 0.0;
};

// One pursuit of `target` over the columns of `atoms`.
OmpResult omp_column(const Eigen::MatrixXd& atoms,
                     const Eigen::VectorXd& target, int psi, double tau);

// Column-wise self-representation: column j of the result carries the OMP
// coefficients of feature j over all other features, with a structural zero
// at the diagonal.  Requires at least two columns.
Eigen::MatrixXd spr_matrix(const Eigen::MatrixXd& features, int psi,
                           double tau);

// |C| + |C^T|, the symmetric nonnegative affinity used downstream.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& coeffs);

}  // namespace afa
