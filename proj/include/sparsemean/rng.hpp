#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace sparsemean::rng {

// Mixes a stream id into a base seed (splitmix64 finalizer) so that
// independent stages of a run draw from unrelated streams.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seeded sampler with all distributions implemented in-repo, so outputs are
// identical across standard libraries and platforms.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  // Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze method.
  double gamma(double shape) {
    if (shape < 1.0) throw std::invalid_argument("gamma: shape must be >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Student-t with integer dof: Z / sqrt(chi2_dof / dof), chi2 = 2 Gamma(dof/2).
  double student_t(int dof) {
    if (dof < 1) throw std::invalid_argument("student_t: dof must be >= 1");
    const double z = normal();
    const double chi2 = 2.0 * gamma(0.5 * dof);
    return z / std::sqrt(chi2 / dof);
  }

  std::vector<Eigen::Index> permutation(Eigen::Index n) {
    std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(uniform_index(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
  }

  // First m entries of a random permutation of [0, n).
  std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index m) {
    auto p = permutation(n);
    p.resize(static_cast<std::size_t>(m));
    return p;
  }

  // Random k-sparse unit vector: Gaussian entries on a random support.
  Eigen::VectorXd sparse_unit(Eigen::Index d, int k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    const auto support = sample_without_replacement(d, k);
    double norm2 = 0.0;
    while (norm2 == 0.0) {
      norm2 = 0.0;
      for (auto idx : support) {
        v[idx] = normal();
        norm2 += v[idx] * v[idx];
      }
    }
    v /= std::sqrt(norm2);
    return v;
  }

 private:
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace sparsemean::rng
