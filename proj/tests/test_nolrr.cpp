#include "nolrr.hpp"

#include <cmath>

#include "cluster.hpp"
#include "doctest.h"
#include "reference.hpp"

using namespace afa;

namespace {

Eigen::VectorXd random_vec(SplitMix64& rng, int n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_normal() * scale;
  return v;
}

}  // namespace

TEST_SUITE("nolrr") {

TEST_CASE("construction clamps the width and seeds the dictionary") {
  NolrrOptions opts;
  opts.d = 50;
  NolrrState s(3, opts, 42, 10);
  CHECK(s.n() == 3);
  CHECK(s.d() == 10);
  CHECK(s.steps() == 0);
  CHECK(s.U().rows() == 0);
  CHECK(s.V().rows() == 0);

  NolrrState again(3, opts, 42, 10);
  CHECK(again.dictionary() == s.dictionary());
  NolrrState other(3, opts, 43, 10);
  CHECK(other.dictionary() != s.dictionary());

  // The entries follow the seeded normal with variance 1/n.
  NolrrOptions wide;
  wide.d = 400;
  NolrrState big(100, wide, 7, -1);
  double var = big.dictionary().array().square().mean();
  CHECK(var == doctest::Approx(1.0 / 100.0).epsilon(0.1));

  NolrrOptions bad;
  bad.d = 0;
  CHECK_THROWS_AS(NolrrState(3, bad, 0), ConfigError);
  bad.d = 2;
  bad.lambda1 = 0.0;
  CHECK_THROWS_AS(NolrrState(3, bad, 0), ConfigError);
}

TEST_CASE("ridge rows follow their closed forms") {
  SplitMix64 rng(11);
  const int n = 6;
  NolrrOptions opts;
  opts.d = 3;
  opts.lambda1 = 1.7;
  opts.keep_history = true;
  NolrrState s(n, opts, 5, 8);

  Eigen::VectorXd f = random_vec(rng, n);
  Eigen::MatrixXd d0 = s.dictionary();
  s.step(f, f);
  CHECK(s.steps() == 1);
  CHECK(s.lambda2() == doctest::Approx(1.0 / std::sqrt(double(n))));

  double l1 = opts.lambda1;
  Eigen::MatrixXd lhs =
      l1 * d0.transpose() * d0 + Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd v_expected = lhs.ldlt().solve(l1 * d0.transpose() * f);
  CHECK((s.V().row(0).transpose() - v_expected).norm() <= 1e-10);

  double l2 = 1.0 / std::sqrt(double(n));
  Eigen::VectorXd u_expected =
      (l2 / (l2 * f.squaredNorm() + 1.0)) * (d0.transpose() * f);
  CHECK((s.U().row(0).transpose() - u_expected).norm() <= 1e-10);

  CHECK(s.lambda2() * std::sqrt(double(n)) == doctest::Approx(1.0));
  Eigen::VectorXd wrong(n + 1);
  wrong.setZero();
  CHECK_THROWS_AS(s.step(wrong, wrong), DataError);
}

TEST_CASE("zero samples leave the representation at zero") {
  NolrrOptions opts;
  opts.d = 2;
  NolrrState s(4, opts, 9, 6);
  s.step(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4));
  CHECK(s.steps() == 1);
  CHECK(s.U().row(0).norm() == 0.0);
  CHECK(s.V().row(0).norm() == 0.0);
}

TEST_CASE("lambda2 grows with the square root of the step count") {
  NolrrOptions opts;
  opts.d = 2;
  NolrrState s(9, opts, 1, 8);
  Eigen::VectorXd f = Eigen::VectorXd::Ones(9);
  for (int i = 0; i < 4; ++i) s.step(f, f);
  CHECK(s.lambda2() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("surrogate bookkeeping matches a by-hand reconstruction") {
  for (MUpdate mode : {MUpdate::kAlgo2, MUpdate::kEq15}) {
    SplitMix64 rng(mode == MUpdate::kAlgo2 ? 31 : 32);
    const int n = 5, d = 3, steps = 6;
    NolrrOptions opts;
    opts.d = d;
    opts.lambda1 = 1.3;
    opts.m_update = mode;
    opts.keep_history = true;
    NolrrState s(n, opts, 77, steps);

    std::vector<Eigen::VectorXd> fs;
    for (int t = 0; t < steps; ++t) {
      fs.push_back(random_vec(rng, n));
      s.step(fs.back(), fs.back());
    }

    Eigen::MatrixXd probe(n, d);
    for (int i = 0; i < probe.size(); ++i) probe.data()[i] = rng.next_normal();

    Eigen::MatrixXd u = s.U(), v = s.V();
    Eigen::MatrixXd m_prev = Eigen::MatrixXd::Zero(n, d);
    double expected = 0.0;
    for (int t = 0; t < steps; ++t) {
      double l2 = std::sqrt(double(t + 1)) / std::sqrt(double(n));
      expected += 0.5 * opts.lambda1 *
                      (fs[t] - probe * v.row(t).transpose()).squaredNorm() +
                  0.5 * v.row(t).squaredNorm();
      expected += 0.5 * u.row(t).squaredNorm() +
                  0.5 * l2 *
                      (probe - m_prev - fs[t] * u.row(t)).squaredNorm();
      m_prev += fs[t] * (mode == MUpdate::kAlgo2 ? v.row(t) : u.row(t));
    }
    expected /= double(steps);
    CHECK(s.surrogate_value(probe) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("surrogate stays above the re-minimised cost along a run") {
  SplitMix64 rng(3);
  const int n = 8, d = 4;
  NolrrOptions opts;
  opts.d = d;
  opts.keep_history = true;
  NolrrState s(n, opts, 15, 40);
  for (int t = 0; t < 40; ++t) {
    Eigen::VectorXd f = random_vec(rng, n);
    s.step(f, f);
    double g = s.surrogate_value(s.dictionary());
    double cost = s.empirical_cost(s.dictionary());
    CHECK(g >= cost - 1e-9);
  }
}

TEST_CASE("history-free states refuse the diagnostics") {
  NolrrOptions opts;
  opts.d = 2;
  NolrrState s(3, opts, 0, 4);
  s.step(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3));
  CHECK_THROWS_AS(s.surrogate_value(s.dictionary()), InternalError);
  CHECK_THROWS_AS(s.empirical_cost(s.dictionary()), InternalError);
}

TEST_CASE("core state size ignores the sample count") {
  NolrrOptions opts;
  opts.d = 4;
  SplitMix64 rng(2);
  NolrrState short_run(6, opts, 1, 100);
  NolrrState long_run(6, opts, 1, 100);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd f = random_vec(rng, 6);
    short_run.step(f, f);
  }
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd f = random_vec(rng, 6);
    long_run.step(f, f);
  }
  CHECK(short_run.core_scalar_count() == long_run.core_scalar_count());
  CHECK(long_run.U().rows() == 50);
}

TEST_CASE("dictionary quadratic: coordinate descent meets the direct solve") {
  SplitMix64 rng(19);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 7, d = 4;
    Eigen::MatrixXd g(n, d);
    for (int i = 0; i < g.size(); ++i) g.data()[i] = rng.next_normal();
    Eigen::MatrixXd warm = Eigen::MatrixXd::Zero(n, d);

    // Diagonal system: the columns decouple, one sweep lands on the optimum.
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) diag(j, j) = 0.5 + rng.next_double() * 2.0;
    Eigen::MatrixXd direct_diag = solve_dictionary_quadratic(diag, g, warm, false);
    Eigen::MatrixXd cd_diag = solve_dictionary_quadratic(diag, g, warm, true);
    CHECK((direct_diag - cd_diag).norm() <=
          1e-8 * (1.0 + direct_diag.norm()));

    // Coupled system: the direct path solves D H = G, the optimum is a fixed
    // point of the sweeps, and sweeping from zero never raises the objective.
    Eigen::MatrixXd half(d, d);
    for (int i = 0; i < half.size(); ++i) half.data()[i] = rng.next_normal();
    Eigen::MatrixXd h =
        half * half.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd direct = solve_dictionary_quadratic(h, g, warm, false);
    CHECK((direct * h - g).norm() <= 1e-8 * (1.0 + g.norm()));
    Eigen::MatrixXd cd_at_opt = solve_dictionary_quadratic(h, g, direct, true);
    CHECK((cd_at_opt - direct).norm() <= 1e-10 * (1.0 + direct.norm()));

    auto objective = [&](const Eigen::MatrixXd& m) {
      return 0.5 * (m * h).cwiseProduct(m).sum() - m.cwiseProduct(g).sum();
    };
    Eigen::MatrixXd cd = solve_dictionary_quadratic(h, g, warm, true);
    CHECK(objective(cd) <= objective(warm) + 1e-12);
    CHECK(objective(cd) >= objective(direct) - 1e-12);
  }
}

TEST_CASE("representation graph is the folded outer product") {
  SplitMix64 rng(23);
  const int n = 6, steps = 9;
  NolrrOptions opts;
  opts.d = 3;
  NolrrState s(n, opts, 4, steps);
  for (int t = 0; t < steps; ++t) {
    Eigen::VectorXd f = random_vec(rng, n);
    s.step(f, f);
  }
  Eigen::MatrixXd w = nolrr_graph(s);
  CHECK(w.rows() == steps);
  CHECK(w.cols() == steps);
  Eigen::MatrixXd c = s.U() * s.V().transpose();
  Eigen::MatrixXd expected =
      0.5 * (c.cwiseAbs() + c.cwiseAbs().transpose());
  CHECK((w - expected).norm() <= 1e-12);
  CHECK((w - w.transpose()).norm() == 0.0);
  CHECK(w.minCoeff() >= 0.0);
}

TEST_CASE("two separated subspaces come out clusterable") {
  SplitMix64 rng(41);
  const int n = 12, per = 30, rank = 2;
  // Mutually orthogonal spans: one QR, columns split between the two.
  Eigen::MatrixXd raw(n, 2 * rank);
  for (int i = 0; i < raw.size(); ++i) raw.data()[i] = rng.next_normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, 2 * rank);
  Eigen::MatrixXd basis_a = q.leftCols(rank), basis_b = q.rightCols(rank);
  std::vector<Eigen::VectorXd> cols;
  std::vector<int32_t> truth;
  for (int i = 0; i < per; ++i) {
    cols.push_back(basis_a * random_vec(rng, rank));
    truth.push_back(0);
    cols.push_back(basis_b * random_vec(rng, rank));
    truth.push_back(1);
  }
  NolrrOptions opts;
  opts.d = 6;
  NolrrState s(n, opts, 10, int(cols.size()));
  for (const auto& f : cols) s.step(f, f);
  Eigen::MatrixXd w = nolrr_graph(s);
  ClusterAssignment a = spectral_cluster(w, 2, 3);
  CHECK(testref::perm_accuracy(a.labels, truth) >= 0.9);
}

}  // TEST_SUITE
