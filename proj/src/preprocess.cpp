#include "sparsemean/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "sparsemean/rng.hpp"

namespace sparsemean {

namespace {

using Eigen::Index;

// floor/ceil that absorb ulp-level noise from products like 100 * 0.01 * n.
Index snapped_floor(double v) { return static_cast<Index>(std::floor(v + 1e-9)); }

double median_inplace(std::vector<double>& vals) {
  const auto n = vals.size();
  const auto mid = n / 2;
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid), vals.end());
  double hi = vals[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid - 1),
                   vals.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (vals[mid - 1] + hi);
}

}  // namespace

GroupedData group_means(const DataMatrix& T, double eps, double group_factor,
                        std::uint64_t seed) {
  const Index n = T.n();
  const Index d = T.d();
  if (!(eps > 0.0) || eps > 0.01) {
    throw std::invalid_argument("group_means: eps must be in (0, 0.01]");
  }
  if (!(group_factor > 0.0)) {
    throw std::invalid_argument("group_means: group_factor must be positive");
  }
  const Index g = snapped_floor(group_factor * eps * static_cast<double>(n));
  if (g < 1) throw std::invalid_argument("group_means: n too small for eps");
  if (g > n) throw std::invalid_argument("group_means: group count exceeds n");
  const Index m = n / g;

  rng::Sampler sampler(seed);
  const auto perm = sampler.permutation(n);

  Eigen::MatrixXd grouped(g, d);
  for (Index i = 0; i < g; ++i) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (Index j = 0; j < m; ++j) {
      acc += T.values.row(perm[static_cast<std::size_t>(i * m + j)]);
    }
    grouped.row(i) = acc / static_cast<double>(m);
  }

  GroupedData out;
  out.grouped = DataMatrix::make(std::move(grouped));
  out.m = m;
  out.sigma = 1.0 / std::sqrt(static_cast<double>(m));
  const Index dropped = n - g * m;
  if (dropped > 0) {
    out.warnings.push_back("group_means: dropped " + std::to_string(dropped) +
                           " remainder rows to keep equal group sizes");
  }
  return out;
}

Eigen::VectorXd coordinatewise_median_of_means(const DataMatrix& T, Index num_buckets,
                                               std::uint64_t seed) {
  const Index n = T.n();
  const Index d = T.d();
  if (n < 1) throw std::invalid_argument("coordinatewise_median_of_means: empty input");
  if (num_buckets < 1 || num_buckets > n) {
    throw std::invalid_argument("coordinatewise_median_of_means: num_buckets out of [1, n]");
  }
  const Index m = n / num_buckets;

  rng::Sampler sampler(seed);
  const auto perm = sampler.permutation(n);

  Eigen::MatrixXd means(num_buckets, d);
  for (Index b = 0; b < num_buckets; ++b) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (Index j = 0; j < m; ++j) {
      acc += T.values.row(perm[static_cast<std::size_t>(b * m + j)]);
    }
    means.row(b) = acc / static_cast<double>(m);
  }

  Eigen::VectorXd med(d);
  std::vector<double> column(static_cast<std::size_t>(num_buckets));
  for (Index j = 0; j < d; ++j) {
    for (Index b = 0; b < num_buckets; ++b) column[static_cast<std::size_t>(b)] = means(b, j);
    med[j] = median_inplace(column);
  }
  return med;
}

Eigen::VectorXd truncate(const Eigen::VectorXd& x, double a, const Eigen::VectorXd& b) {
  if (!(a > 0.0)) throw std::invalid_argument("truncate: radius must be positive");
  if (x.size() != b.size()) throw std::invalid_argument("truncate: dimension mismatch");
  return b + (x - b).cwiseMax(-a).cwiseMin(a);
}

DataMatrix truncate_set(const DataMatrix& T, double a, const Eigen::VectorXd& b) {
  if (!(a > 0.0)) throw std::invalid_argument("truncate_set: radius must be positive");
  if (T.d() != b.size()) throw std::invalid_argument("truncate_set: dimension mismatch");
  Eigen::MatrixXd out = T.values;
  for (Index i = 0; i < out.rows(); ++i) {
    out.row(i) = b.transpose() + (out.row(i) - b.transpose()).cwiseMax(-a).cwiseMin(a);
  }
  return DataMatrix{std::move(out)};
}

}  // namespace sparsemean
