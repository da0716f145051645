#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "sparsemean/types.hpp"

namespace sparsemean {

enum class CleanFamily { gaussian_sparse_mean, axis_spike, bounded_fourth };
enum class AdversaryKind { none, sparse_shift, dense_noise, lb_pair };

CleanFamily clean_family_from_string(const std::string& s);
AdversaryKind adversary_kind_from_string(const std::string& s);

/// Seeded clean-data generator spec. All families carry a random k-sparse
/// mean with per-entry magnitude `mag` (signs seeded).
struct CleanSpec {
  CleanFamily family = CleanFamily::gaussian_sparse_mean;
  Eigen::Index d = 1;
  int k = 1;
  Eigen::Index n = 1;
  double mag = 0.0;  // per-entry magnitude of the sparse mean
  double sd = 1.0;   // gaussian_sparse_mean: coordinate standard deviation
  double t = 2.0;    // axis_spike: moment order, spike length r = d^(1/t)
  int dof = 5;       // bounded_fourth: Student-t degrees of freedom, >= 5
  std::uint64_t seed = 0;
};

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::none;
  double eps = 0.0;          // in [0, 0.5)
  double scale = 0.0;        // sparse_shift: shift length, 0 means 1/sqrt(eps)
  double range = 100.0;      // dense_noise: entries uniform in [-range, range]
};

/// Draws n samples and returns them with the ground-truth mean.
std::pair<DataMatrix, Eigen::VectorXd> sample_clean(const CleanSpec& spec);

/// Replaces exactly ceil(eps * n) seeded-random rows according to the
/// adversary strategy; all other rows are untouched.
DataMatrix corrupt(const DataMatrix& S, const Eigen::VectorXd& mu_true,
                   const AdversarySpec& adv, int k, std::uint64_t seed);

struct LbPairDescription {
  double alpha = 0.0;        // per-coordinate value of the shifted point
  double mean_gap_2k = 0.0;  // l_{2,k} separation of the two means
  double tv = 0.0;           // total variation distance
};

/// Analytic parameters of the indistinguishable pair: alpha = 1/sqrt(k eps),
/// mean gap sqrt(eps), TV distance eps. Requires k >= 1/sqrt(eps).
LbPairDescription lb_pair_description(Eigen::Index d, int k, double eps);

}  // namespace sparsemean
