#include "nolrr.hpp"

#include <cmath>

namespace afa {

namespace {

// Minimised per-sample reconstruction loss
// min_v lambda1/2 ||f - D v||^2 + 1/2 ||v||^2, via the ridge normal system.
double min_recon_loss(const Eigen::VectorXd& f, const Eigen::MatrixXd& D,
                      double lambda1) {
  int d = int(D.cols());
  Eigen::MatrixXd K =
      lambda1 * (D.transpose() * D) + Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd v = lambda1 * K.ldlt().solve(D.transpose() * f);
  return 0.5 * lambda1 * (f - D * v).squaredNorm() + 0.5 * v.squaredNorm();
}

// Minimised per-sample basis loss
// min_u 1/2 ||u||^2 + lambda2/2 ||D - M_prev - y u^T||^2_F.
double min_basis_loss(const Eigen::VectorXd& y, const Eigen::MatrixXd& D,
                      const Eigen::MatrixXd& m_prev, double lambda2) {
  Eigen::MatrixXd R = D - m_prev;
  Eigen::VectorXd u =
      (lambda2 / (lambda2 * y.squaredNorm() + 1.0)) * (R.transpose() * y);
  return 0.5 * u.squaredNorm() + 0.5 * lambda2 * (R - y * u.transpose()).squaredNorm();
}

double quadratic_objective(const Eigen::MatrixXd& D, const Eigen::MatrixXd& H,
                           const Eigen::MatrixXd& G) {
  return 0.5 * (D * H).cwiseProduct(D).sum() - D.cwiseProduct(G).sum();
}

}  // namespace

NolrrState::NolrrState(int n, const NolrrOptions& opts, uint64_t seed,
                       int expected_samples)
    : n_(n), opts_(opts) {
  if (n < 1) throw DataError("nolrr: feature dimension must be >= 1");
  if (opts.d < 1) throw ConfigError("nolrr: d must be >= 1");
  if (opts.lambda1 <= 0) throw ConfigError("nolrr: lambda1 must be > 0");
  d_ = opts.d;
  if (expected_samples > 0) d_ = std::min(d_, expected_samples);
  lambda2_ini_ = 1.0 / std::sqrt(double(n_));

  SplitMix64 rng(seed);
  D_.resize(n_, d_);
  double scale = 1.0 / std::sqrt(double(n_));
  for (int j = 0; j < d_; ++j)
    for (int i = 0; i < n_; ++i) D_(i, j) = scale * rng.next_normal();
  A_ = Eigen::MatrixXd::Zero(d_, d_);
  B_ = Eigen::MatrixXd::Zero(n_, d_);
  M_ = Eigen::MatrixXd::Zero(n_, d_);
}

double NolrrState::lambda2() const {
  return std::sqrt(double(std::max(1, t_))) * lambda2_ini_;
}

void NolrrState::step(const Eigen::VectorXd& f, const Eigen::VectorXd& y) {
  if (f.size() != n_ || y.size() != n_)
    throw DataError("nolrr: sample dimension mismatch");
  ++t_;
  double lambda2 = std::sqrt(double(t_)) * lambda2_ini_;
  double lambda1 = opts_.lambda1;

  if (opts_.keep_history)
    history_.push_back({lambda2, f, y, M_});

  Eigen::MatrixXd K =
      lambda1 * (D_.transpose() * D_) + Eigen::MatrixXd::Identity(d_, d_);
  Eigen::VectorXd v = lambda1 * K.ldlt().solve(D_.transpose() * f);
  Eigen::VectorXd u = (lambda2 / (lambda2 * y.squaredNorm() + 1.0)) *
                      ((D_ - M_).transpose() * y);
  v_rows_.push_back(v);
  u_rows_.push_back(u);

  if (opts_.m_update == MUpdate::kAlgo2)
    M_ += f * v.transpose();
  else
    M_ += y * u.transpose();
  A_ += v * v.transpose();
  B_ += f * v.transpose();

  update_dictionary(lambda2);
}

void NolrrState::update_dictionary(double lambda2) {
  Eigen::MatrixXd H = opts_.lambda1 * A_ +
                      lambda2 * Eigen::MatrixXd::Identity(d_, d_);
  Eigen::MatrixXd G = opts_.lambda1 * B_ + lambda2 * M_;
  D_ = solve_dictionary_quadratic(H, G, D_, false);
}

Eigen::MatrixXd solve_dictionary_quadratic(const Eigen::MatrixXd& H,
                                           const Eigen::MatrixXd& G,
                                           Eigen::MatrixXd warm_start,
                                           bool force_coordinate_descent) {
  const int d = int(H.rows());
  AFA_CHECK(H.cols() == d && G.cols() == d, "dictionary solve: shape mismatch");

  if (!force_coordinate_descent) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo > 0.0 && hi / lo < 1e10) {
      // Well conditioned: D H = G solved directly.
      return H.ldlt().solve(G.transpose()).transpose();
    }
  }

  // Column-wise coordinate descent on the same quadratic.
  Eigen::MatrixXd D = std::move(warm_start);
  double prev = quadratic_objective(D, H, G);
  for (int pass = 0; pass < 10; ++pass) {
    for (int j = 0; j < d; ++j) {
      double hjj = H(j, j);
      if (hjj <= 0.0) continue;
      D.col(j) += (G.col(j) - D * H.col(j)) / hjj;
    }
    double cur = quadratic_objective(D, H, G);
    double denom = std::max(1.0, std::abs(prev));
    if (std::abs(prev - cur) / denom < 1e-8) break;
    prev = cur;
  }
  return D;
}

Eigen::MatrixXd NolrrState::U() const {
  Eigen::MatrixXd U(t_, d_);
  for (int i = 0; i < t_; ++i) U.row(i) = u_rows_[i].transpose();
  return U;
}

Eigen::MatrixXd NolrrState::V() const {
  Eigen::MatrixXd V(t_, d_);
  for (int i = 0; i < t_; ++i) V.row(i) = v_rows_[i].transpose();
  return V;
}

double NolrrState::surrogate_value(const Eigen::MatrixXd& D) const {
  AFA_CHECK(t_ > 0, "surrogate_value: no samples consumed");
  AFA_CHECK(opts_.keep_history, "surrogate_value: history not kept");
  double acc = 0.0;
  for (int i = 0; i < t_; ++i) {
    const auto& tr = history_[i];
    acc += 0.5 * opts_.lambda1 * (tr.f - D * v_rows_[i]).squaredNorm() +
           0.5 * v_rows_[i].squaredNorm();
    // The stored u_i is admissible for its own minimised basis loss, so each
    // term here upper-bounds the matching term of empirical_cost at any D.
    acc += 0.5 * u_rows_[i].squaredNorm() +
           0.5 * tr.lambda2 *
               (D - tr.m_prev - tr.y * u_rows_[i].transpose()).squaredNorm();
  }
  return acc / double(t_);
}

double NolrrState::empirical_cost(const Eigen::MatrixXd& D) const {
  AFA_CHECK(t_ > 0, "empirical_cost: no samples consumed");
  AFA_CHECK(opts_.keep_history, "empirical_cost: history not kept");
  double acc = 0.0;
  for (int i = 0; i < t_; ++i) {
    const auto& tr = history_[i];
    acc += min_recon_loss(tr.f, D, opts_.lambda1);
    acc += min_basis_loss(tr.y, D, tr.m_prev, tr.lambda2);
  }
  return acc / double(t_);
}

Eigen::MatrixXd nolrr_graph(const NolrrState& state) {
  AFA_CHECK(state.steps() > 0, "nolrr_graph: no samples consumed");
  Eigen::MatrixXd C = state.U() * state.V().transpose();
  return 0.5 * (C.cwiseAbs() + C.transpose().cwiseAbs());
}

}  // namespace afa
