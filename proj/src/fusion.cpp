#include "fusion.hpp"

#include <algorithm>
#include <cmath>

namespace afa {

Eigen::MatrixXd adjacency_graph(const SuperpixelScale& scale,
                                const Eigen::MatrixXd& features,
                                AffinityKernel kernel) {
  const int n = scale.count();
  if (int(features.cols()) != n)
    throw DataError("adjacency_graph: feature count mismatch");
  constexpr double kGaussSigma = 20.0;

  double max_norm = 0.0;
  for (int j = 0; j < n; ++j) max_norm = std::max(max_norm, features.col(j).norm());
  Eigen::MatrixXd F = max_norm > 0.0 ? (features / max_norm).eval() : features;

  // Per-node regression coefficients onto the spatial neighbours
  // (minimum-norm least squares, deterministic).
  std::vector<std::vector<double>> coeff(n);
  for (int i = 0; i < n; ++i) {
    const auto& nbrs = scale.adjacency[i];
    if (nbrs.empty()) continue;
    Eigen::MatrixXd Ma(F.rows(), nbrs.size());
    for (size_t c = 0; c < nbrs.size(); ++c) Ma.col(c) = F.col(nbrs[c]);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Ma);
    Eigen::VectorXd sol = cod.solve(F.col(i));
    coeff[i].assign(sol.data(), sol.data() + sol.size());
  }
  auto pair_error = [&](int i, int j) {
    const auto& nbrs = scale.adjacency[i];
    size_t pos = std::lower_bound(nbrs.begin(), nbrs.end(), j) - nbrs.begin();
    double c = coeff[i][pos];
    return (F.col(i) - c * F.col(j)).squaredNorm();
  };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 1.0;
    for (int j : scale.adjacency[i]) {
      if (j < i) continue;  // fill both sides from the (i < j) visit
      double r = 0.5 * (pair_error(i, j) + pair_error(j, i));
      double w = kernel == AffinityKernel::kLinear
                     ? std::max(0.0, 1.0 - r)
                     : std::exp(-r / (kGaussSigma * kGaussSigma));
      A(i, j) = w;
      A(j, i) = w;
    }
  }
  return A;
}

Eigen::MatrixXd fuse(const Eigen::MatrixXd& adjacency,
                     const Eigen::MatrixXd& w, const std::vector<int>& nodes) {
  const int n = int(adjacency.rows());
  const int m = int(nodes.size());
  AFA_CHECK(adjacency.cols() == n, "fuse: adjacency not square");
  if (w.rows() != m || w.cols() != m)
    throw DataError("fuse: low-rank graph size does not match node count");
  for (int i : nodes)
    if (i < 0 || i >= n) throw DataError("fuse: node index out of range");

  Eigen::MatrixXd out = adjacency;
  double peak = w.size() > 0 ? w.maxCoeff() : 0.0;
  Eigen::MatrixXd ws = peak > 0.0 ? (w / peak).eval() : w;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      out(nodes[a], nodes[b]) = ws(a, b);
      out(nodes[b], nodes[a]) = ws(b, a);
    }
  return out;
}

Eigen::SparseMatrix<double> bipartite(
    const ScaleStack& stack, const std::vector<Eigen::MatrixXd>& graphs,
    double beta) {
  if (beta <= 0.0) throw ConfigError("bipartite: beta must be > 0");
  if (graphs.size() != stack.scales.size())
    throw DataError("bipartite: one affinity graph per scale required");
  const int64_t pixels = int64_t(stack.width) * stack.height;

  std::vector<int> y_offset(stack.scales.size() + 1, 0);
  for (size_t k = 0; k < stack.scales.size(); ++k) {
    const int nk = stack.scales[k].count();
    if (graphs[k].rows() != nk || graphs[k].cols() != nk)
      throw DataError("bipartite: affinity graph size mismatch at a scale");
    y_offset[k + 1] = y_offset[k] + nk;
  }
  const int64_t ny = y_offset.back();
  const int64_t nx = pixels + ny;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(pixels) * stack.scales.size() + size_t(ny) * 8);
  for (size_t k = 0; k < stack.scales.size(); ++k) {
    const auto& labels = stack.scales[k].labels.labels;
    for (int64_t p = 0; p < pixels; ++p)
      trips.emplace_back(int(p), y_offset[k] + labels[p], beta);
    const Eigen::MatrixXd& A = graphs[k];
    for (int i = 0; i < A.rows(); ++i)
      for (int j = 0; j < A.cols(); ++j)
        if (A(i, j) != 0.0)
          trips.emplace_back(int(pixels) + y_offset[k] + i, y_offset[k] + j,
                             A(i, j));
  }
  Eigen::SparseMatrix<double> b(nx, ny);
  b.setFromTriplets(trips.begin(), trips.end());
  b.makeCompressed();
  return b;
}

TcutContext::TcutContext(const Eigen::SparseMatrix<double>& b) {
  nx_ = int(b.rows());
  ny_ = int(b.cols());
  if (ny_ < 1 || nx_ < 1) throw DataError("tcut: empty bipartite graph");
  for (int c = 0; c < b.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(b, c); it; ++it)
      if (it.value() < 0.0) throw DataError("tcut: negative edge weight");

  dx_ = b * Eigen::VectorXd::Ones(ny_);
  Eigen::VectorXd dy = b.transpose() * Eigen::VectorXd::Ones(nx_);

  // Y nodes with zero degree cannot enter the eigenproblem; they keep zero
  // eigenvector entries and cap the usable number of clusters.
  std::vector<int> active;
  for (int j = 0; j < ny_; ++j)
    if (dy[j] > 0.0) active.push_back(j);
  na_ = int(active.size());
  if (na_ == 0) throw DataError("tcut: graph has no edges");

  dx_inv_.resize(nx_);
  for (int i = 0; i < nx_; ++i) dx_inv_[i] = dx_[i] > 0.0 ? 1.0 / dx_[i] : 0.0;

  ba_.resize(nx_, na_);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(size_t(b.nonZeros()));
    std::vector<int> col_of(ny_, -1);
    for (int j = 0; j < na_; ++j) col_of[active[j]] = j;
    for (int c = 0; c < b.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(b, c); it; ++it)
        if (col_of[it.col()] >= 0)
          trips.emplace_back(int(it.row()), col_of[it.col()], it.value());
    ba_.setFromTriplets(trips.begin(), trips.end());
    ba_.makeCompressed();
  }
  da_.resize(na_);
  for (int j = 0; j < na_; ++j) da_[j] = dy[active[j]];

  // W_Y = B^T D_X^{-1} B over the active columns, then the symmetric
  // normalisation D_Y^{-1/2} W_Y D_Y^{-1/2}.
  Eigen::SparseMatrix<double> scaled = dx_inv_.asDiagonal() * ba_;
  Eigen::SparseMatrix<double> wy =
      Eigen::SparseMatrix<double>(ba_.transpose()) * scaled;
  da_isqrt_ = da_.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> nrm =
      da_isqrt_.asDiagonal() * wy * da_isqrt_.asDiagonal();
  nrm_sym_ = 0.5 * (nrm + Eigen::SparseMatrix<double>(nrm.transpose()));
  nrm_sym_.makeCompressed();
}

void TcutContext::prepare(int k_max, uint64_t seed) const {
  int k = std::min(std::max(k_max, 1), na_);
  uint64_t eig_seed = derive_seed(seed, "tcut-eigs");
  if (eig_valid_ && eig_seed_ == eig_seed && eig_k_ >= k) return;
  eig_ = sym_eig_topk(nrm_sym_, k, eig_seed);
  eig_k_ = k;
  eig_seed_ = eig_seed;
  eig_valid_ = true;
}

TcutResult TcutContext::partition(int k_t, uint64_t seed,
                                  int embed_rows) const {
  if (k_t < 1) throw ConfigError("tcut: k_t must be >= 1");
  if (embed_rows < 0) embed_rows = nx_;
  if (embed_rows > nx_) throw DataError("tcut: embed_rows exceeds X side");

  TcutResult res;
  res.k_used = std::min(k_t, na_);
  prepare(res.k_used, seed);

  res.eigenvalues.resize(res.k_used);
  Eigen::MatrixXd full_x(nx_, res.k_used);
  for (int c = 0; c < res.k_used; ++c) {
    double mu = std::min(1.0, std::max(0.0, eig_.values[c]));
    double root = std::sqrt(mu);
    // Equivalent eigenvalue of the full-graph normalised Laplacian.
    res.eigenvalues[c] = 1.0 - root;
    Eigen::VectorXd v = da_isqrt_.asDiagonal() * eig_.vectors.col(c);
    Eigen::VectorXd u = dx_inv_.asDiagonal() * (ba_ * v);
    if (root > 1e-8) u /= root;
    // Match the D-normalisation a direct solve of the full graph would use.
    double dnorm2 = u.cwiseProduct(dx_).dot(u) + v.cwiseProduct(da_).dot(v);
    if (dnorm2 > 0.0) u /= std::sqrt(dnorm2);
    full_x.col(c) = u;
  }
  res.embedding = full_x.topRows(embed_rows);

  Eigen::MatrixXd rows = res.embedding;
  for (int r = 0; r < rows.rows(); ++r) {
    double norm = rows.row(r).norm();
    if (norm > 0.0) rows.row(r) /= norm;
  }
  KmeansResult km =
      kmeans(rows, res.k_used, derive_seed(seed, "tcut-kmeans", uint64_t(k_t)));
  res.labels = std::move(km.labels);
  res.num_labels = relabel_dense(res.labels);
  return res;
}

TcutResult tcut(const Eigen::SparseMatrix<double>& b, int k_t, uint64_t seed,
                int embed_rows) {
  TcutContext ctx(b);
  return ctx.partition(k_t, seed, embed_rows);
}

}  // namespace afa
