#include "sparsemean/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparsemean {

DataMatrix DataMatrix::make(Eigen::MatrixXd m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw std::invalid_argument("DataMatrix: need n >= 1 and d >= 1");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("DataMatrix: entries must be finite");
  }
  return DataMatrix{std::move(m)};
}

void WeightVector::validate() const {
  if (w.size() < 1) throw std::invalid_argument("WeightVector: empty");
  if ((w.array() < 0.0).any()) {
    throw std::invalid_argument("WeightVector: weights must be nonnegative");
  }
  if (!(w.sum() > 0.0)) {
    throw std::invalid_argument("WeightVector: total weight must be positive");
  }
}

bool WeightVector::in_delta(double eps, double tol) const {
  if (w.size() < 1) return false;
  if ((w.array() < 0.0).any()) return false;
  const double cap = 1.0 / ((1.0 - eps) * static_cast<double>(w.size()));
  if ((w.array() > cap + tol).any()) return false;
  return std::abs(w.sum() - 1.0) <= tol;
}

void EstimatorConfig::validate(Eigen::Index n_for) const {
  if (!(eps > 0.0) || eps > 0.01) {
    throw std::invalid_argument("EstimatorConfig: eps must be in (0, 0.01]");
  }
  if (!(tau > 0.0) || !(tau < 1.0)) {
    throw std::invalid_argument("EstimatorConfig: tau must be in (0, 1)");
  }
  if (k < 1) throw std::invalid_argument("EstimatorConfig: k must be >= 1");
  if (!(group_factor > 0.0) || !(trunc_factor > 0.0) || !(stop_constant > 0.0)) {
    throw std::invalid_argument("EstimatorConfig: factors must be positive");
  }
  if (max_filter_iters < 0) {
    throw std::invalid_argument("EstimatorConfig: max_filter_iters must be >= 0");
  }
  if (!(solver_tol > 0.0) || solver_max_iters < 1) {
    throw std::invalid_argument("EstimatorConfig: invalid solver options");
  }
  if (n_for >= 0 && eps * static_cast<double>(n_for) < 1.0) {
    throw std::invalid_argument("EstimatorConfig: eps * n must be >= 1");
  }
}

std::vector<Eigen::Index> topk_magnitude_indices(const Eigen::VectorXd& v, int k) {
  const Eigen::Index d = v.size();
  if (k < 1 || k > d) throw std::invalid_argument("topk: k out of range [1, d]");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&v](Eigen::Index a, Eigen::Index b) {
                      const double ma = std::abs(v[a]), mb = std::abs(v[b]);
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

double l2k_norm(const Eigen::VectorXd& v, int k) {
  const auto idx = topk_magnitude_indices(v, k);
  double s = 0.0;
  for (auto i : idx) s += v[i] * v[i];
  return std::sqrt(s);
}

Eigen::VectorXd hard_threshold_topk(const Eigen::VectorXd& v, int k) {
  const auto idx = topk_magnitude_indices(v, k);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (auto i : idx) out[i] = v[i];
  return out;
}

}  // namespace sparsemean
