#include "sparsemean/genlab.hpp"

#include <cmath>

#include "sparsemean/rng.hpp"

namespace sparsemean {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

Index snapped_ceil(double v) { return static_cast<Index>(std::ceil(v - 1e-9)); }

VectorXd random_sparse_mean(Index d, int k, double mag, rng::Sampler& sampler) {
  VectorXd mu = VectorXd::Zero(d);
  const auto support = sampler.sample_without_replacement(d, k);
  for (auto idx : support) {
    mu[idx] = sampler.uniform() < 0.5 ? mag : -mag;
  }
  return mu;
}

}  // namespace

CleanFamily clean_family_from_string(const std::string& s) {
  if (s == "gaussian_sparse_mean") return CleanFamily::gaussian_sparse_mean;
  if (s == "axis_spike") return CleanFamily::axis_spike;
  if (s == "bounded_fourth") return CleanFamily::bounded_fourth;
  throw std::invalid_argument("unknown clean family: " + s);
}

AdversaryKind adversary_kind_from_string(const std::string& s) {
  if (s == "none") return AdversaryKind::none;
  if (s == "sparse_shift") return AdversaryKind::sparse_shift;
  if (s == "dense_noise") return AdversaryKind::dense_noise;
  if (s == "lb_pair") return AdversaryKind::lb_pair;
  throw std::invalid_argument("unknown adversary kind: " + s);
}

std::pair<DataMatrix, Eigen::VectorXd> sample_clean(const CleanSpec& spec) {
  const Index d = spec.d, n = spec.n;
  if (d < 1 || n < 1) throw std::invalid_argument("sample_clean: need n >= 1 and d >= 1");
  if (spec.k < 1 || spec.k > d) throw std::invalid_argument("sample_clean: k out of range [1, d]");

  rng::Sampler sampler(spec.seed);
  const VectorXd mu = random_sparse_mean(d, spec.k, spec.mag, sampler);

  Eigen::MatrixXd X(n, d);
  switch (spec.family) {
    case CleanFamily::gaussian_sparse_mean: {
      if (spec.sd < 0.0) throw std::invalid_argument("sample_clean: sd must be >= 0");
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) X(i, j) = mu[j] + spec.sd * sampler.normal();
      }
      break;
    }
    case CleanFamily::axis_spike: {
      if (spec.t < 2.0) throw std::invalid_argument("sample_clean: axis_spike needs t >= 2");
      const double r = std::pow(static_cast<double>(d), 1.0 / spec.t);
      for (Index i = 0; i < n; ++i) {
        X.row(i) = mu.transpose();
        const auto j = static_cast<Index>(sampler.uniform_index(static_cast<std::uint64_t>(d)));
        const double s = sampler.uniform() < 0.5 ? r : -r;
        X(i, j) += s;
      }
      break;
    }
    case CleanFamily::bounded_fourth: {
      if (spec.dof < 5) throw std::invalid_argument("sample_clean: bounded_fourth needs dof >= 5");
      // rescaled to unit variance: Var(t_dof) = dof / (dof - 2)
      const double scale = std::sqrt(static_cast<double>(spec.dof) / (spec.dof - 2.0));
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) X(i, j) = mu[j] + sampler.student_t(spec.dof) / scale;
      }
      break;
    }
  }
  return {DataMatrix::make(std::move(X)), mu};
}

DataMatrix corrupt(const DataMatrix& S, const Eigen::VectorXd& mu_true,
                   const AdversarySpec& adv, int k, std::uint64_t seed) {
  const Index n = S.n(), d = S.d();
  if (mu_true.size() != d) throw std::invalid_argument("corrupt: mean dimension mismatch");
  if (adv.eps < 0.0 || adv.eps >= 0.5) {
    throw std::invalid_argument("corrupt: eps must be in [0, 0.5)");
  }
  DataMatrix out{S.values};
  if (adv.kind == AdversaryKind::none || adv.eps == 0.0) return out;

  const Index m = snapped_ceil(adv.eps * static_cast<double>(n));
  if (m == 0) return out;

  rng::Sampler sampler(seed);
  const auto rows = sampler.sample_without_replacement(n, m);

  switch (adv.kind) {
    case AdversaryKind::sparse_shift: {
      const double scale = adv.scale > 0.0 ? adv.scale : 1.0 / std::sqrt(adv.eps);
      const VectorXd u = sampler.sparse_unit(d, k);
      const VectorXd point = mu_true + scale * u;
      for (auto i : rows) out.values.row(i) = point.transpose();
      break;
    }
    case AdversaryKind::dense_noise: {
      for (auto i : rows) {
        for (Index j = 0; j < d; ++j) out.values(i, j) = sampler.uniform_in(-adv.range, adv.range);
      }
      break;
    }
    case AdversaryKind::lb_pair: {
      const auto desc = lb_pair_description(d, k, adv.eps);
      VectorXd y = VectorXd::Zero(d);
      for (int j = 0; j < k; ++j) y[j] = desc.alpha;
      const VectorXd point = mu_true + y;
      for (auto i : rows) out.values.row(i) = point.transpose();
      break;
    }
    case AdversaryKind::none:
      break;
  }
  return out;
}

LbPairDescription lb_pair_description(Eigen::Index d, int k, double eps) {
  if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("lb_pair: eps must be in (0, 1)");
  if (k < 1 || k > d) throw std::invalid_argument("lb_pair: k out of range [1, d]");
  if (static_cast<double>(k) < 1.0 / std::sqrt(eps)) {
    throw std::invalid_argument("lb_pair: hypothesis k >= 1/sqrt(eps) violated");
  }
  LbPairDescription out;
  out.alpha = 1.0 / std::sqrt(static_cast<double>(k) * eps);
  out.mean_gap_2k = std::sqrt(eps);
  out.tv = eps;
  return out;
}

}  // namespace sparsemean
