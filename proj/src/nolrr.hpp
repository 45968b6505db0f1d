// Online low-rank representation over the global-node features.
//
// Samples arrive one column at a time.  Each step solves two ridge
// subproblems in closed form (the representation row v_t against the current
// dictionary, the basis-mixing row u_t against the accumulated rank-one
// spine M), refreshes the accumulators, and re-minimises the dictionary
// quadratic.  Memory is O(n*d + d^2): nothing grows with the sample count
// except the returned representation rows themselves.
#pragma once

#include <Eigen/Dense>
#include <optional>

#include "common.hpp"

namespace afa {

enum class MUpdate { kAlgo2, kEq15 };  // spine update: f v^T vs y u^T

struct NolrrOptions {
  int d = 50;                       // dictionary width (clamped to sample count)
  double lambda1 = 1.0;             // reconstruction weight
  MUpdate m_update = MUpdate::kAlgo2;
  bool keep_history = false;        // retain per-step traces for diagnostics
};

class NolrrState {
 public:
  // expected_samples > 0 clamps the effective dictionary width to
  // min(d, expected_samples) so the representation can never exceed the
  // attainable rank.  The dictionary starts i.i.d. N(0, 1/n), seeded.
  NolrrState(int n, const NolrrOptions& opts, uint64_t seed,
             int expected_samples = -1);

  // Consumes one sample pair (f_t, y_t); the pipeline passes y_t = f_t.
  void step(const Eigen::VectorXd& f, const Eigen::VectorXd& y);

  int n() const { return n_; }
  int d() const { return d_; }
  int steps() const { return t_; }
  double lambda2() const;  // sqrt(t) * lambda2_ini, the current weight
  const Eigen::MatrixXd& dictionary() const { return D_; }
  Eigen::MatrixXd U() const;  // t x d, one row per consumed sample
  Eigen::MatrixXd V() const;

  // Scalars held in the fixed-size core (D, A, B, M); independent of the
  // number of consumed samples.
  size_t core_scalar_count() const {
    return size_t(D_.size()) + size_t(A_.size()) + size_t(B_.size()) +
           size_t(M_.size());
  }

  // Averaged majorising surrogate at an arbitrary dictionary: every stored
  // (v_i, u_i) pair plugged into its own step's loss, spine prefix and
  // weight included.  Dominates empirical_cost term by term.  Needs
  // keep_history.
  double surrogate_value(const Eigen::MatrixXd& D) const;
  // Averaged empirical cost at an arbitrary dictionary with per-sample
  // losses re-minimised in closed form, each against the spine prefix and
  // the weight that were in force at its own step.  Needs keep_history.
  double empirical_cost(const Eigen::MatrixXd& D) const;

 private:
  void update_dictionary(double lambda2);

  int n_;
  int d_;
  int t_ = 0;
  NolrrOptions opts_;
  double lambda2_ini_;
  Eigen::MatrixXd D_;  // n x d
  Eigen::MatrixXd A_;  // d x d, sum of v v^T
  Eigen::MatrixXd B_;  // n x d, sum of f v^T
  Eigen::MatrixXd M_;  // n x d, rank-one spine
  std::vector<Eigen::VectorXd> u_rows_;
  std::vector<Eigen::VectorXd> v_rows_;

  struct StepTrace {
    double lambda2;
    Eigen::VectorXd f, y;
    Eigen::MatrixXd m_prev;
  };
  std::vector<StepTrace> history_;
};

// W = (|C| + |C^T|) / 2 with C = U V^T; symmetric nonnegative, m x m.
Eigen::MatrixXd nolrr_graph(const NolrrState& state);

// Fixed point of the dictionary quadratic 0.5*Tr(D^T D H) - Tr(D^T G),
// exposed for cross-checking the closed-form and coordinate-descent paths.
Eigen::MatrixXd solve_dictionary_quadratic(const Eigen::MatrixXd& H,
                                           const Eigen::MatrixXd& G,
                                           Eigen::MatrixXd warm_start,
                                           bool force_coordinate_descent);

}  // namespace afa
