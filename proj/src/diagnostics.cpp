#include "sparsemean/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "sparsemean/xk_norm.hpp"

namespace sparsemean {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index snapped_ceil(double v) { return static_cast<Index>(std::ceil(v - 1e-9)); }

double subsets_at_least(Index n, Index s0) {
  double total = 0.0;
  for (Index s = s0; s <= n; ++s) {
    double c = 1.0;
    for (Index i = 0; i < s; ++i) {
      c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
      if (c > 1e18) break;
    }
    total += c;
    if (total > 1e18) break;
  }
  return total;
}

}  // namespace

StabilityVerdict check_stability(const DataMatrix& S, const Eigen::VectorXd& mu,
                                 double sigma, double eps, double delta, int k) {
  const Index n = S.n(), d = S.d();
  if (mu.size() != d) throw std::invalid_argument("check_stability: mean dimension mismatch");
  if (!(sigma > 0.0)) throw std::invalid_argument("check_stability: sigma must be positive");
  if (!(eps > 0.0) || eps >= 0.5) throw std::invalid_argument("check_stability: eps must be in (0, 0.5)");
  if (eps > delta) throw std::invalid_argument("check_stability: requires eps <= delta");
  if (k < 1 || k > d) throw std::invalid_argument("check_stability: k out of range [1, d]");

  const Index s0 = snapped_ceil((1.0 - eps) * static_cast<double>(n));
  if (s0 < 1) throw std::invalid_argument("check_stability: degenerate subset size");
  if (subsets_at_least(n, s0) > 1e6) {
    throw CapacityError("check_stability: more than 10^6 subsets to enumerate");
  }

  const double mean_bound = sigma * delta;
  const double cov_bound = sigma * sigma * delta * delta / eps;

  // centered rows and per-point outer contributions reused across subsets
  MatrixXd C = S.values;
  C.rowwise() -= mu.transpose();

  StabilityVerdict verdict;
  verdict.stable = true;
  double worst_score = -1.0;

  std::vector<Index> comb;
  MatrixXd second(d, d);
  for (Index s = s0; s <= n; ++s) {
    comb.resize(static_cast<std::size_t>(s));
    std::iota(comb.begin(), comb.end(), Index{0});
    for (;;) {
      VectorXd mean = VectorXd::Zero(d);
      second.setZero();
      for (auto i : comb) {
        mean += S.values.row(i).transpose();
        second.noalias() += C.row(i).transpose() * C.row(i);
      }
      mean /= static_cast<double>(s);
      second /= static_cast<double>(s);
      second.diagonal().array() -= sigma * sigma;

      const double mean_dev = l2k_norm(mean - mu, k);
      const double cov_dev = xk_norm(second, k).value;
      const double score = std::max(mean_dev / mean_bound, cov_dev / cov_bound);
      if (score > worst_score) {
        worst_score = score;
        verdict.worst_subset = comb;
        verdict.worst_mean_dev = mean_dev;
        verdict.worst_cov_dev = cov_dev;
      }
      if (mean_dev > mean_bound || cov_dev > cov_bound) verdict.stable = false;

      Index pos = s - 1;
      while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == n - s + pos) --pos;
      if (pos < 0) break;
      ++comb[static_cast<std::size_t>(pos)];
      for (Index j = pos + 1; j < s; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return verdict;
}

std::vector<Eigen::Index> weights_to_subset(const DataMatrix& S, const WeightVector& w,
                                            double eps) {
  const Index n = S.n();
  if (w.n() != n) throw std::invalid_argument("weights_to_subset: weight count mismatch");
  if (!(eps > 0.0) || eps >= 0.5) throw std::invalid_argument("weights_to_subset: eps must be in (0, 0.5)");
  if (!w.in_delta(eps)) {
    throw std::invalid_argument("weights_to_subset: w is not in Delta_{n,eps}");
  }

  const Index keep = snapped_ceil((1.0 - 2.0 * eps) * static_cast<double>(n));
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    if (w.w[a] != w.w[b]) return w.w[a] > w.w[b];
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(keep));
  std::sort(idx.begin(), idx.end());
  return idx;
}

RegularityResult check_coordinate_regularity(const DataMatrix& S, const Eigen::VectorXd& mu,
                                             double a, double alpha) {
  const Index n = S.n(), d = S.d();
  if (mu.size() != d) throw std::invalid_argument("check_coordinate_regularity: mean dimension mismatch");
  if (!(a > 0.0)) throw std::invalid_argument("check_coordinate_regularity: a must be positive");
  if (!(alpha > 0.0) || alpha >= 1.0) {
    throw std::invalid_argument("check_coordinate_regularity: alpha must be in (0, 1)");
  }

  const double half = 0.5 * a;
  const double coord_budget = 3.0 * alpha * static_cast<double>(n);
  const auto removal_budget = static_cast<Index>(std::floor(0.01 * static_cast<double>(n) + 1e-9));

  // Z is implicit: per-point violation counts are static, per-coordinate
  // counts shrink as points are removed.
  std::vector<Index> coord_count(static_cast<std::size_t>(d), 0);
  std::vector<int> point_count(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    int c = 0;
    for (Index j = 0; j < d; ++j) {
      if (std::abs(S.values(i, j) - mu[j]) >= half) {
        ++c;
        ++coord_count[static_cast<std::size_t>(j)];
      }
    }
    point_count[static_cast<std::size_t>(i)] = c;
  }

  auto over_budget = [&]() {
    Index cnt = 0;
    for (Index j = 0; j < d; ++j) {
      if (static_cast<double>(coord_count[static_cast<std::size_t>(j)]) > coord_budget) ++cnt;
    }
    return cnt;
  };

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    return point_count[static_cast<std::size_t>(x)] > point_count[static_cast<std::size_t>(y)];
  });

  std::vector<bool> removed(static_cast<std::size_t>(n), false);
  Index removals = 0;
  Index over = over_budget();
  for (auto i : order) {
    if (over == 0 || removals >= removal_budget) break;
    if (point_count[static_cast<std::size_t>(i)] == 0) break;  // only violators are worth removing
    removed[static_cast<std::size_t>(i)] = true;
    ++removals;
    for (Index j = 0; j < d; ++j) {
      if (std::abs(S.values(i, j) - mu[j]) >= half) {
        auto& c = coord_count[static_cast<std::size_t>(j)];
        const bool was_over = static_cast<double>(c) > coord_budget;
        --c;
        if (was_over && !(static_cast<double>(c) > coord_budget)) --over;
      }
    }
  }

  RegularityResult res;
  for (Index i = 0; i < n; ++i) {
    if (!removed[static_cast<std::size_t>(i)]) res.subset.push_back(i);
  }

  // exact re-check of the constraints on the returned subset
  std::vector<Index> exact(static_cast<std::size_t>(d), 0);
  for (auto i : res.subset) {
    for (Index j = 0; j < d; ++j) {
      if (std::abs(S.values(i, j) - mu[j]) >= half) ++exact[static_cast<std::size_t>(j)];
    }
  }
  res.feasible = static_cast<double>(res.subset.size()) >= 0.99 * static_cast<double>(n);
  for (Index j = 0; j < d && res.feasible; ++j) {
    if (static_cast<double>(exact[static_cast<std::size_t>(j)]) > coord_budget) res.feasible = false;
  }
  return res;
}

}  // namespace sparsemean
