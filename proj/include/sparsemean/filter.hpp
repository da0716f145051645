#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sparsemean/types.hpp"

namespace sparsemean {

/// One downweighting round: certificate value, how much mass the round
/// removed, the largest score, and the weighted mean score (which must match
/// the certificate value — the filter soundness identity).
struct FilterRecord {
  double xk_value = 0.0;
  double removed_mass_delta = 0.0;
  double max_score = 0.0;
  double mean_score = 0.0;
};

struct FilterTrace {
  std::vector<FilterRecord> records;
};

struct FilterResult {
  Eigen::VectorXd mu_hat;
  WeightVector w;
  FilterTrace trace;
  bool converged = false;
  std::int64_t iterations = 0;
  std::vector<std::string> warnings;
};

/// Iterative downweighting filter. Each round computes the weighted mean and
/// covariance, solves for the worst certificate direction, and either stops
/// (value <= stop_constant * sigma^2) or multiplicatively downweights by
/// quadratic-form scores, zeroing at least the argmax-score point. Exits with
/// converged=false when the next round would push removed mass past 0.1 or
/// the iteration cap is reached.
FilterResult stability_filter(const DataMatrix& T, int k, double sigma,
                              const EstimatorConfig& cfg);

/// Quadratic-form scores tau_i = (x_i - mu)^T M (x_i - mu).
Eigen::VectorXd score_points(const DataMatrix& T, const WeightVector& w,
                             const Eigen::VectorXd& mu, const Eigen::MatrixXd& M);

}  // namespace sparsemean
