#include "sparsemean/pipeline.hpp"

#include <cmath>

#include "sparsemean/preprocess.hpp"
#include "sparsemean/rng.hpp"

namespace sparsemean {

PipelineResult robust_sparse_mean(const DataMatrix& T, const EstimatorConfig& cfg) {
  const Eigen::Index n = T.n();
  const Eigen::Index d = T.d();
  cfg.validate(n);
  if (cfg.k > d) throw std::invalid_argument("robust_sparse_mean: k exceeds dimension");
  const auto n_min = static_cast<Eigen::Index>(std::ceil(1.0 / (cfg.group_factor * cfg.eps)));
  if (n < std::max<Eigen::Index>(n_min, 16)) {
    throw std::invalid_argument("robust_sparse_mean: too few samples for eps");
  }

  GroupedData grouped = group_means(T, cfg.eps, cfg.group_factor, rng::derive(cfg.seed, 1));
  const Eigen::Index g = grouped.grouped.n();
  if (g < 16) {
    throw std::invalid_argument("robust_sparse_mean: fewer than 16 groups, refusing");
  }
  const double sigma = grouped.sigma;

  // Preliminary center at corruption 0.01 and failure tau/2; the bucket count
  // grows with the corrupted-group count plus log(2d / tau), capped at g.
  Eigen::Index buckets = static_cast<Eigen::Index>(
      std::ceil(8.0 * (0.01 * static_cast<double>(g) +
                       std::log(2.0 * static_cast<double>(d) / cfg.tau))));
  buckets = std::max<Eigen::Index>(1, std::min(buckets, g));
  const Eigen::VectorXd mu_tilde =
      coordinatewise_median_of_means(grouped.grouped, buckets, rng::derive(cfg.seed, 2));

  const double radius = cfg.trunc_factor * sigma * std::sqrt(static_cast<double>(cfg.k));
  const DataMatrix truncated = truncate_set(grouped.grouped, radius, mu_tilde);

  FilterResult filt = stability_filter(truncated, cfg.k, sigma, cfg);

  PipelineResult out;
  out.report.mu_hat = filt.mu_hat;
  out.report.mu_tilde = mu_tilde;
  out.report.sigma = sigma;
  out.report.removed_mass = 1.0 - filt.w.total();
  out.report.iterations = filt.iterations;
  out.report.converged = filt.converged;
  out.report.warnings = grouped.warnings;
  out.report.warnings.insert(out.report.warnings.end(), filt.warnings.begin(),
                             filt.warnings.end());
  out.mu_sparse = hard_threshold_topk(filt.mu_hat, cfg.k);
  out.trace = std::move(filt.trace);
  return out;
}

double error_2k(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& mu_true, int k) {
  if (mu_hat.size() != mu_true.size()) {
    throw std::invalid_argument("error_2k: dimension mismatch");
  }
  return l2k_norm(mu_hat - mu_true, k);
}

}  // namespace sparsemean
