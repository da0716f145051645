#pragma once

#include <vector>

#include <Eigen/Core>

#include "sparsemean/types.hpp"

namespace sparsemean {

struct StabilityVerdict {
  bool stable = false;
  std::vector<Eigen::Index> worst_subset;
  double worst_mean_dev = 0.0;  // l_{2,k} deviation of the subset mean from mu
  double worst_cov_dev = 0.0;   // certificate norm of the mu-centered second moment minus sigma^2 I
};

/// Exhaustive stability check: enumerates every subset S' with
/// |S'| >= ceil((1 - eps) |S|) and verifies
///   (i)  l2k(mean(S') - mu) <= sigma * delta
///   (ii) xk_norm(second_moment_mu(S') - sigma^2 I, k) <= sigma^2 delta^2 / eps
/// where the second moment centers at the *given* mu, not the subset mean.
/// Refuses (CapacityError) beyond 10^6 subsets.
StabilityVerdict check_stability(const DataMatrix& S, const Eigen::VectorXd& mu,
                                 double sigma, double eps, double delta, int k);

/// The ceil((1 - 2 eps) n) indices of largest weight (ties by lowest index),
/// returned in ascending index order. Requires w in Delta_{n,eps}.
std::vector<Eigen::Index> weights_to_subset(const DataMatrix& S, const WeightVector& w,
                                            double eps);

struct RegularityResult {
  bool feasible = false;
  std::vector<Eigen::Index> subset;  // retained indices, ascending
};

/// Sound-but-incomplete feasibility check for per-coordinate regularity:
/// with Z_{ij} = 1[|x_{ij} - mu_j| >= a/2], greedily removes up to 0.01 n
/// points (most violated coordinates first) until every coordinate satisfies
/// sum_i Z_{ij} <= 3 alpha n. feasible=true certifies the constraints on the
/// returned subset; feasible=false is inconclusive.
RegularityResult check_coordinate_regularity(const DataMatrix& S, const Eigen::VectorXd& mu,
                                             double a, double alpha);

}  // namespace sparsemean
