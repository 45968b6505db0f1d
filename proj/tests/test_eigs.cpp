#include "eigs.hpp"

#include "doctest.h"
#include "reference.hpp"

using namespace afa;

namespace {

Eigen::SparseMatrix<double> random_sym_sparse(int n, double density,
                                              uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n; ++i) {
    trips.push_back({i, i, rng.next_normal()});
    for (int j = i + 1; j < n; ++j)
      if (rng.next_double() < density) {
        double v = rng.next_normal();
        trips.push_back({i, j, v});
        trips.push_back({j, i, v});
      }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace

TEST_SUITE("eigs") {

TEST_CASE("dense solver orders a diagonal matrix") {
  Eigen::MatrixXd d = Eigen::Vector3d(3.0, 1.0, 2.0).asDiagonal();
  SymEig e = sym_eig_dense(d);
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(3.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("iterative top-k agrees with a dense solve") {
  const int n = 400;
  Eigen::SparseMatrix<double> a = random_sym_sparse(n, 0.02, 99);
  SymEig topk = sym_eig_topk(a, 6, 1234);
  REQUIRE(topk.values.size() == 6);

  Eigen::MatrixXd dense(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  double scale = dense.norm();
  for (int c = 0; c < 6; ++c) {
    CHECK(topk.values[c] ==
          doctest::Approx(es.eigenvalues()[n - 1 - c]).epsilon(1e-8));
    Eigen::VectorXd v = topk.vectors.col(c);
    CHECK((dense * v - topk.values[c] * v).norm() <= 1e-8 * scale);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (int c = 1; c < 6; ++c) CHECK(topk.values[c] <= topk.values[c - 1]);
}

TEST_CASE("small problems fall back to the dense path consistently") {
  Eigen::SparseMatrix<double> a = random_sym_sparse(50, 0.2, 7);
  SymEig topk = sym_eig_topk(a, 4, 55);
  Eigen::MatrixXd dense(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  for (int c = 0; c < 4; ++c)
    CHECK(topk.values[c] ==
          doctest::Approx(es.eigenvalues()[49 - c]).epsilon(1e-10));
}

TEST_CASE("k-means separates far blobs and repeats exactly") {
  SplitMix64 rng(3);
  const int per = 20;
  Eigen::MatrixXd pts(3 * per, 2);
  double centers[3][2] = {{0, 0}, {30, 0}, {0, 30}};
  std::vector<int32_t> truth(3 * per);
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < per; ++i) {
      pts(b * per + i, 0) = centers[b][0] + rng.next_normal();
      pts(b * per + i, 1) = centers[b][1] + rng.next_normal();
      truth[b * per + i] = b;
    }
  KmeansResult km = kmeans(pts, 3, 17);
  CHECK(testref::perm_accuracy(km.labels, truth) == 1.0);

  KmeansResult again = kmeans(pts, 3, 17);
  CHECK(again.labels == km.labels);
  CHECK(again.inertia == km.inertia);

  KmeansResult one = kmeans(pts, 1, 17);
  for (int32_t l : one.labels) CHECK(l == 0);
  CHECK(one.inertia >= km.inertia);
}

TEST_CASE("k-means survives duplicate points and k above multiplicity") {
  Eigen::MatrixXd pts(5, 2);
  pts << 1, 1, 1, 1, 1, 1, 8, 8, 8, 8;
  KmeansResult km = kmeans(pts, 2, 0);
  CHECK(km.labels[0] == km.labels[1]);
  CHECK(km.labels[1] == km.labels[2]);
  CHECK(km.labels[3] == km.labels[4]);
  CHECK(km.labels[0] != km.labels[3]);

  // More clusters than distinct points: all labels stay in range.
  KmeansResult wide = kmeans(pts, 4, 0);
  for (int32_t l : wide.labels) {
    CHECK(l >= 0);
    CHECK(l < 4);
  }
}

}  // TEST_SUITE
