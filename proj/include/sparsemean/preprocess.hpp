#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sparsemean/types.hpp"

namespace sparsemean {

/// Result of median-of-means grouping: g group means plus the scale 1/sqrt(m).
struct GroupedData {
  DataMatrix grouped;
  Eigen::Index m = 1;     // group size
  double sigma = 1.0;     // exactly 1/sqrt(m)
  std::vector<std::string> warnings;
};

/// Randomly permutes rows (seeded), partitions into g = floor(group_factor *
/// eps * n) groups of size m = floor(n / g), and replaces each group by its
/// sample mean. Remainder rows are dropped and reported in a warning.
GroupedData group_means(const DataMatrix& T, double eps, double group_factor,
                        std::uint64_t seed);

/// Coordinate-wise median of bucket means over a seeded random partition into
/// `num_buckets` equal buckets (excess rows dropped). Medians of an even count
/// use the midpoint convention.
Eigen::VectorXd coordinatewise_median_of_means(const DataMatrix& T, Eigen::Index num_buckets,
                                               std::uint64_t seed);

/// Projects x onto the l_infinity ball of radius a around b, coordinatewise.
Eigen::VectorXd truncate(const Eigen::VectorXd& x, double a, const Eigen::VectorXd& b);

/// Row-wise truncation of a whole sample set.
DataMatrix truncate_set(const DataMatrix& T, double a, const Eigen::VectorXd& b);

}  // namespace sparsemean
