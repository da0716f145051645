#include "sparsemean/filter.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "sparsemean/rng.hpp"
#include "sparsemean/xk_norm.hpp"

namespace sparsemean {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kMassCap = 0.1;

// Weighted covariance centered at the weighted mean, accumulated over row
// blocks so the n x d sample matrix is never copied wholesale.
MatrixXd weighted_covariance(const MatrixXd& X, const VectorXd& w, double total,
                             const VectorXd& mu) {
  const Index n = X.rows(), d = X.cols();
  MatrixXd S = MatrixXd::Zero(d, d);
  const Index block = 8192;
  MatrixXd buf;
  for (Index i0 = 0; i0 < n; i0 += block) {
    const Index b = std::min(block, n - i0);
    buf = X.middleRows(i0, b);
    buf.array().colwise() *= w.segment(i0, b).array().sqrt();
    S.selfadjointView<Eigen::Lower>().rankUpdate(buf.transpose(), 1.0);
  }
  S = S.selfadjointView<Eigen::Lower>();
  S /= total;
  S.noalias() -= mu * mu.transpose();
  return S;
}

}  // namespace

Eigen::VectorXd score_points(const DataMatrix& T, const WeightVector& w,
                             const Eigen::VectorXd& mu, const Eigen::MatrixXd& M) {
  const Index n = T.n(), d = T.d();
  if (w.n() != n) throw std::invalid_argument("score_points: weight count mismatch");
  if (mu.size() != d || M.rows() != d || M.cols() != d) {
    throw std::invalid_argument("score_points: dimension mismatch");
  }
  VectorXd tau(n);
  for (Index i = 0; i < n; ++i) {
    const VectorXd c = T.values.row(i).transpose() - mu;
    tau[i] = c.dot(M * c);
  }
  return tau;
}

FilterResult stability_filter(const DataMatrix& T, int k, double sigma,
                              const EstimatorConfig& cfg) {
  const Index n = T.n(), d = T.d();
  if (k < 1 || k > d) throw std::invalid_argument("stability_filter: k out of range [1, d]");
  if (!(sigma > 0.0)) throw std::invalid_argument("stability_filter: sigma must be positive");

  const double threshold = cfg.stop_constant * sigma * sigma;
  const std::int64_t max_iters = cfg.max_filter_iters > 0 ? cfg.max_filter_iters
                                                          : static_cast<std::int64_t>(n);
  XkSolverOptions solver_opts;
  solver_opts.tol = cfg.solver_tol;
  solver_opts.max_iters = cfg.solver_max_iters;
  solver_opts.seed = rng::derive(cfg.seed, 0x50f7);

  FilterResult res;
  res.w.w = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  VectorXd& w = res.w.w;

  for (std::int64_t iter = 1; iter <= max_iters; ++iter) {
    const double total = w.sum();
    if (!(total > 1e-12)) {
      throw EstimationError("stability_filter: all weights zeroed");
    }
    const VectorXd mu = T.values.transpose() * w / total;
    const MatrixXd cov = weighted_covariance(T.values, w, total, mu);
    const XkCertificate cert = xk_norm(cov, k, solver_opts);
    res.iterations = iter;
    res.mu_hat = mu;

    FilterRecord rec;
    rec.xk_value = cert.value;

    // Scores along the certificate direction; rank-one M makes this O(n d).
    VectorXd tau;
    if (cert.direction.size() == d) {
      VectorXd proj = T.values * cert.direction;
      proj.array() -= mu.dot(cert.direction);
      tau = proj.array().square();
    } else {
      tau = score_points(T, res.w, mu, cert.M);
    }

    double tau_max = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (w[i] > 0.0 && tau[i] > tau_max) tau_max = tau[i];
    }
    rec.max_score = tau_max;
    rec.mean_score = w.dot(tau) / total;

    if (cert.value <= threshold) {
      res.trace.records.push_back(rec);
      res.converged = true;
      return res;
    }

    if (!(tau_max > 0.0)) {
      rec.removed_mass_delta = 0.0;
      res.trace.records.push_back(rec);
      res.warnings.push_back("stability_filter: degenerate scores, cannot downweight");
      res.converged = false;
      return res;
    }

    VectorXd w_next = (w.array() * (1.0 - tau.array() / tau_max).max(0.0)).matrix();
    const double removed_after = 1.0 - w_next.sum();
    if (removed_after > kMassCap) {
      rec.removed_mass_delta = 0.0;
      res.trace.records.push_back(rec);
      res.warnings.push_back("stability_filter: removed-mass cap reached before stability");
      res.converged = false;
      return res;
    }
    rec.removed_mass_delta = removed_after - (1.0 - total);
    res.trace.records.push_back(rec);
    w = std::move(w_next);
  }

  res.warnings.push_back("stability_filter: iteration cap reached before stability");
  res.converged = false;
  return res;
}

}  // namespace sparsemean
