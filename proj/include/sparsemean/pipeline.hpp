#pragma once

#include <Eigen/Core>

#include "sparsemean/filter.hpp"
#include "sparsemean/types.hpp"

namespace sparsemean {

struct PipelineResult {
  EstimateReport report;
  Eigen::VectorXd mu_sparse;  // hard_threshold_topk(report.mu_hat, k)
  FilterTrace trace;          // per-iteration filter records
};

/// End-to-end estimator: median-of-means grouping, coordinate-wise
/// median-of-means center, l_infinity truncation at radius
/// trunc_factor * sigma * sqrt(k), then the stability filter.
PipelineResult robust_sparse_mean(const DataMatrix& T, const EstimatorConfig& cfg);

/// l_{2,k} distance between an estimate and the ground truth.
double error_2k(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& mu_true, int k);

}  // namespace sparsemean
