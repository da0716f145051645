#include "sparsemean/xk_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "sparsemean/rng.hpp"

namespace sparsemean {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Power iteration for the top eigenvector of B + shift*I. The shift keeps the
// dominant eigenvalue positive for any symmetric B with ||B||_2 <= 1.
VectorXd top_eigvec_power(const MatrixXd& B, double shift, VectorXd v, int iters) {
  const Index d = B.rows();
  if (v.size() != d || v.norm() == 0.0) {
    v = VectorXd::Ones(d);
    for (Index i = 0; i < d; ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
  }
  v.normalize();
  for (int t = 0; t < iters; ++t) {
    VectorXd u = B * v + shift * v;
    const double norm = u.norm();
    if (norm == 0.0) break;
    u /= norm;
    const double delta = (u - v).norm();
    v = u;
    if (delta < 1e-13) break;
  }
  return v;
}

// Keeps the k largest-magnitude entries of u (ties by lowest index),
// normalized. Falls back to the previous iterate when u vanishes.
VectorXd project_k_sparse(const VectorXd& u, int k, const VectorXd& fallback) {
  VectorXd out = hard_threshold_topk(u, k);
  const double norm = out.norm();
  if (norm == 0.0) return fallback;
  return out / norm;
}

// Truncated power iterations: v <- P_k((B + shift I) v) until the support
// stabilizes.
VectorXd truncated_power(const MatrixXd& B, double shift, int k, VectorXd v, int max_iters) {
  v = project_k_sparse(v, k, v);
  std::vector<Index> prev_support;
  for (int t = 0; t < max_iters; ++t) {
    VectorXd u = B * v + shift * v;
    VectorXd next = project_k_sparse(u, k, v);
    auto support = topk_magnitude_indices(next, k);
    std::sort(support.begin(), support.end());
    const double delta = (next - v).norm();
    v = next;
    if (support == prev_support && delta < 1e-13) break;
    prev_support = std::move(support);
  }
  return v;
}

std::vector<Index> sorted_support(const VectorXd& v, int k) {
  auto s = topk_magnitude_indices(v, k);
  std::sort(s.begin(), s.end());
  // drop indices whose entry is exactly zero so the support is genuine
  std::vector<Index> out;
  for (auto i : s) {
    if (v[i] != 0.0) out.push_back(i);
  }
  if (out.empty()) out.push_back(s.front());
  return out;
}

// Penalized linear minimization oracle: soft-threshold the gradient at level
// lambda and take the top eigenvector; lambda is bisected until the vector's
// outer product meets the l1 budget ||v||_1^2 <= k.
VectorXd soft_threshold_vertex(const MatrixXd& B, int k, const VectorXd& warm) {
  const double max_entry = B.cwiseAbs().maxCoeff();
  if (max_entry == 0.0) return VectorXd::Unit(B.rows(), 0);

  auto eigvec_at = [&](double lambda, const VectorXd& start) {
    MatrixXd S = ((B.array().abs() - lambda).cwiseMax(0.0) * B.array().sign()).matrix();
    return top_eigvec_power(S, 1.01, start, 80);
  };
  auto feasible = [&](const VectorXd& v) {
    const double l1 = v.lpNorm<1>();
    return l1 * l1 <= static_cast<double>(k) * (1.0 + 1e-9);
  };

  double lo = 0.0, hi = max_entry;
  VectorXd v = eigvec_at(0.0, warm);
  if (feasible(v)) return v;
  VectorXd best = v;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    VectorXd cand = eigvec_at(mid, best);
    if (feasible(cand)) {
      best = cand;
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return best;
}

double submatrix_top_eig(const MatrixXd& B, const std::vector<Index>& support) {
  const auto s = static_cast<Index>(support.size());
  MatrixXd sub(s, s);
  for (Index a = 0; a < s; ++a) {
    for (Index b = 0; b < s; ++b) {
      sub(a, b) = B(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(s - 1);
}

// Coordinate-exchange local search: swap one in-support index against one
// outside until the top eigenvalue of the principal submatrix stops improving.
std::vector<Index> swap_refine(const MatrixXd& B, std::vector<Index> support) {
  const Index d = B.rows();
  if (support.empty()) return support;
  double best = submatrix_top_eig(B, support);
  std::vector<bool> in(static_cast<std::size_t>(d), false);
  for (auto i : support) in[static_cast<std::size_t>(i)] = true;
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool improved = false;
    for (std::size_t pos = 0; pos < support.size(); ++pos) {
      const Index old = support[pos];
      for (Index j = 0; j < d; ++j) {
        if (in[static_cast<std::size_t>(j)]) continue;
        support[pos] = j;
        const double val = submatrix_top_eig(B, support);
        if (val > best + 1e-14) {
          best = val;
          in[static_cast<std::size_t>(old)] = false;
          in[static_cast<std::size_t>(j)] = true;
          improved = true;
          break;
        }
        support[pos] = old;
      }
    }
    if (!improved) break;
  }
  std::sort(support.begin(), support.end());
  return support;
}

// Pair-exchange escape for supports where single swaps have stalled.
std::vector<Index> pair_swap_refine(const MatrixXd& B, std::vector<Index> support) {
  const Index d = B.rows();
  const auto k = static_cast<Index>(support.size());
  if (k < 2 || d - k < 2) return support;
  double best = submatrix_top_eig(B, support);
  for (int round = 0; round < 16; ++round) {
    std::vector<Index> outside;
    outside.reserve(static_cast<std::size_t>(d - k));
    std::vector<bool> in(static_cast<std::size_t>(d), false);
    for (auto i : support) in[static_cast<std::size_t>(i)] = true;
    for (Index j = 0; j < d; ++j) {
      if (!in[static_cast<std::size_t>(j)]) outside.push_back(j);
    }
    bool improved = false;
    for (Index a = 0; a < k && !improved; ++a) {
      for (Index b = a + 1; b < k && !improved; ++b) {
        for (std::size_t c = 0; c + 1 < outside.size() && !improved; ++c) {
          for (std::size_t e = c + 1; e < outside.size() && !improved; ++e) {
            std::vector<Index> trial = support;
            trial[static_cast<std::size_t>(a)] = outside[c];
            trial[static_cast<std::size_t>(b)] = outside[e];
            std::sort(trial.begin(), trial.end());
            const double val = submatrix_top_eig(B, trial);
            if (val > best + 1e-14) {
              support = swap_refine(B, trial);
              best = submatrix_top_eig(B, support);
              improved = true;
            }
          }
        }
      }
    }
    if (!improved) break;
  }
  return support;
}

// Greedy forward selection: grow the support one coordinate at a time by the
// top eigenvalue of the enlarged principal submatrix.
std::vector<Index> greedy_support(const MatrixXd& B, int k) {
  const Index d = B.rows();
  std::vector<Index> support;
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  MatrixXd sub;
  for (int step = 0; step < k; ++step) {
    Index best_j = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < d; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      std::vector<Index> trial = support;
      trial.push_back(j);
      const auto s = static_cast<Index>(trial.size());
      sub.resize(s, s);
      for (Index a = 0; a < s; ++a) {
        for (Index b = 0; b < s; ++b) {
          sub(a, b) = B(trial[static_cast<std::size_t>(a)], trial[static_cast<std::size_t>(b)]);
        }
      }
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sub);
      const double val = eig.eigenvalues()(s - 1);
      if (val > best_val) {
        best_val = val;
        best_j = j;
      }
    }
    support.push_back(best_j);
    used[static_cast<std::size_t>(best_j)] = true;
    std::sort(support.begin(), support.end());
  }
  return support;
}

}  // namespace

double xk_entrywise_bound(const Eigen::MatrixXd& A, int k) {
  if (A.rows() != A.cols()) throw std::invalid_argument("xk_entrywise_bound: matrix must be square");
  if (!A.allFinite()) throw std::invalid_argument("xk_entrywise_bound: entries must be finite");
  const Index d = A.rows();
  double eta1 = 0.0, eta2 = 0.0;
  for (Index i = 0; i < d; ++i) {
    eta1 = std::max(eta1, std::abs(A(i, i)));
    for (Index j = 0; j < d; ++j) {
      if (i != j) eta2 = std::max(eta2, std::abs(A(i, j)));
    }
  }
  return eta1 + static_cast<double>(k) * eta2;
}

XkCertificate xk_norm(const Eigen::MatrixXd& A_in, int k, const XkSolverOptions& opts) {
  const Index d = A_in.rows();
  if (A_in.cols() != d) throw std::invalid_argument("xk_norm: matrix must be square");
  if (k < 1 || k > d) throw std::invalid_argument("xk_norm: k out of range [1, d]");
  if (!A_in.allFinite()) throw std::invalid_argument("xk_norm: entries must be finite");
  if (!(opts.tol > 0.0) || opts.max_iters < 1) {
    throw std::invalid_argument("xk_norm: invalid solver options");
  }

  const double scale = std::max(1.0, A_in.cwiseAbs().maxCoeff());
  const double asym = (A_in - A_in.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw std::invalid_argument("xk_norm: matrix is not symmetric within tolerance");
  }
  const MatrixXd A = 0.5 * (A_in + A_in.transpose());

  const double fro = A.norm();
  XkCertificate cert;
  if (fro == 0.0) {
    cert.M = MatrixXd::Zero(d, d);
    cert.M(0, 0) = 1.0;
    cert.direction = VectorXd::Unit(d, 0);
    cert.value = 0.0;
    return cert;
  }

  const MatrixXd Ahat = A / fro;  // candidate generation is scale covariant
  const int extra_restarts = d <= 64 ? 40 : 0;
  const int tpower_iters = 300;

  // Every candidate contributes a support of size <= k; each support is scored
  // exactly by its extreme eigenpair, so the certificate is a feasible vertex
  // (a k-sparse unit vector has ||v||_1^2 <= k).
  double best_val = -std::numeric_limits<double>::infinity();
  VectorXd best_v;
  std::set<std::vector<Index>> seen;
  MatrixXd sub;
  auto consider_support = [&](const std::vector<Index>& support) {
    if (support.empty()) return;
    if (!seen.insert(support).second) return;
    const auto s = static_cast<Index>(support.size());
    sub.resize(s, s);
    for (Index a = 0; a < s; ++a) {
      for (Index b = 0; b < s; ++b) {
        sub(a, b) = A(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sub);
    const Index which = std::abs(eig.eigenvalues()(0)) > std::abs(eig.eigenvalues()(s - 1)) ? 0 : s - 1;
    const double val = std::abs(eig.eigenvalues()(which));
    if (val > best_val) {
      best_val = val;
      best_v = VectorXd::Zero(d);
      for (Index a = 0; a < s; ++a) {
        best_v[support[static_cast<std::size_t>(a)]] = eig.eigenvectors()(a, which);
      }
    }
  };

  // Best single axis.
  {
    Index arg = 0;
    for (Index i = 1; i < d; ++i) {
      if (std::abs(A(i, i)) > std::abs(A(arg, arg))) arg = i;
    }
    consider_support({arg});
  }

  std::int64_t budget = std::max<std::int64_t>(opts.max_iters, 16);
  for (double sign : {1.0, -1.0}) {
    const MatrixXd B = sign * Ahat;
    int stagnant_rounds = 0;
    double last_best = best_val;
    auto round_done = [&]() {
      if (best_val <= last_best + opts.tol * fro) {
        ++stagnant_rounds;
      } else {
        stagnant_rounds = 0;
      }
      last_best = best_val;
      --budget;
      return stagnant_rounds >= 10 || budget <= 0;
    };

    // Pool of candidate supports for this maximization direction; all of them
    // feed the coordinate-exchange polish at small d, the strongest one does
    // at large d.
    std::vector<std::vector<Index>> pool;
    std::set<std::vector<Index>> pooled;
    std::vector<Index> sign_best;
    double sign_best_val = -std::numeric_limits<double>::infinity();
    auto track = [&](const std::vector<Index>& support) {
      if (support.empty()) return;
      if (pooled.insert(support).second) pool.push_back(support);
      const double val = submatrix_top_eig(B, support);
      if (val > sign_best_val) {
        sign_best_val = val;
        sign_best = support;
      }
      consider_support(support);
    };

    [&] {
      // Dense leading eigenvector and its truncated-power refinement.
      VectorXd dense = top_eigvec_power(B, 1.01, VectorXd(), 200);
      track(sorted_support(project_k_sparse(dense, k, dense), k));
      VectorXd tp = truncated_power(B, 1.01, k, dense, tpower_iters);
      track(sorted_support(tp, k));
      if (round_done()) return;

      // Penalized LMO vertex and its refinement.
      VectorXd lmo = soft_threshold_vertex(B, k, dense);
      track(sorted_support(project_k_sparse(lmo, k, lmo), k));
      VectorXd lmo_ref = truncated_power(B, 1.01, k, lmo, tpower_iters);
      track(sorted_support(lmo_ref, k));
      if (round_done()) return;

      // Deterministic greedy support growth, locally polished.
      track(swap_refine(B, greedy_support(B, k)));
      if (round_done()) return;

      if (d <= 64) {
        // Eigenbasis starts: the optimum's support tends to align with the
        // heavy coordinates of some leading eigenvector.
        Eigen::SelfAdjointEigenSolver<MatrixXd> full(B);
        const Index top = std::min<Index>(d, 8);
        for (Index j = 0; j < top; ++j) {
          const VectorXd v = full.eigenvectors().col(d - 1 - j);
          track(sorted_support(project_k_sparse(v, k, v), k));
        }
        // Row starts: each row's largest-magnitude entries.
        for (Index i = 0; i < d; ++i) {
          track(sorted_support(project_k_sparse(B.row(i).transpose(), k,
                                                VectorXd::Unit(d, i)), k));
        }
      }

      // Seeded random restarts; diversification is bounded by the iteration
      // budget, not the stagnation rule.
      rng::Sampler sampler(rng::derive(opts.seed, sign > 0 ? 11 : 13));
      const int n_restarts = std::max(0, opts.restarts) + extra_restarts;
      for (int r = 0; r < n_restarts; ++r) {
        VectorXd start = sampler.sparse_unit(d, k);
        VectorXd refined = truncated_power(B, 1.01, k, start, tpower_iters);
        track(sorted_support(refined, k));
        if (--budget <= 0) return;
      }
    }();

    // Coordinate-exchange polish, with a pair-swap escape on the strongest
    // supports once single swaps stall.
    if (d <= 64) {
      std::vector<std::pair<double, std::vector<Index>>> polished;
      std::set<std::vector<Index>> polished_seen;
      for (const auto& support : pool) {
        auto refined = swap_refine(B, support);
        consider_support(refined);
        if (polished_seen.insert(refined).second) {
          polished.emplace_back(submatrix_top_eig(B, refined), std::move(refined));
        }
      }
      std::sort(polished.begin(), polished.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      const std::size_t escapes = std::min<std::size_t>(3, polished.size());
      for (std::size_t i = 0; i < escapes; ++i) {
        consider_support(pair_swap_refine(B, polished[i].second));
      }
    } else if (!sign_best.empty()) {
      consider_support(swap_refine(B, sign_best));
    }
  }

  VectorXd v = best_v;
  v.normalize();
  cert.direction = v;
  cert.M = v * v.transpose();
  cert.value = std::abs((A.cwiseProduct(cert.M)).sum());
  return cert;
}

SparseEigResult sparse_max_eigenvalue_bruteforce(const Eigen::MatrixXd& A, int k) {
  const Index d = A.rows();
  if (A.cols() != d) throw std::invalid_argument("bruteforce: matrix must be square");
  if (k < 1 || k > d) throw std::invalid_argument("bruteforce: k out of range [1, d]");
  if (!A.allFinite()) throw std::invalid_argument("bruteforce: entries must be finite");

  double count = 1.0;  // C(d, k), in floating point to guard overflow
  for (int i = 0; i < k; ++i) count *= static_cast<double>(d - i) / static_cast<double>(i + 1);
  if (count > 1e6) {
    throw CapacityError("bruteforce: C(d, k) exceeds the 10^6 subset budget");
  }

  const MatrixXd S = 0.5 * (A + A.transpose());
  SparseEigResult best;
  best.value = -std::numeric_limits<double>::infinity();

  std::vector<Index> comb(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
  MatrixXd sub(k, k);
  for (;;) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        sub(a, b) = S(comb[static_cast<std::size_t>(a)], comb[static_cast<std::size_t>(b)]);
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sub);
    const double val = eig.eigenvalues()(k - 1);
    if (val > best.value) {
      best.value = val;
      best.support = comb;
      VectorXd v = VectorXd::Zero(d);
      const VectorXd w = eig.eigenvectors().col(k - 1);
      for (int a = 0; a < k; ++a) v[comb[static_cast<std::size_t>(a)]] = w[a];
      best.vector = v;
    }
    // next combination in lexicographic order
    int pos = k - 1;
    while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == d - k + pos) --pos;
    if (pos < 0) break;
    ++comb[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

void validate_certificate(const XkCertificate& cert, const Eigen::MatrixXd& A, int k) {
  const Index d = A.rows();
  if (cert.M.rows() != d || cert.M.cols() != d) {
    throw std::invalid_argument("certificate: dimension mismatch");
  }
  const double froM = cert.M.norm();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (cert.M + cert.M.transpose()));
  if (eig.eigenvalues()(0) < -1e-8 * froM) {
    throw std::invalid_argument("certificate: M is not PSD within tolerance");
  }
  if (std::abs(cert.M.trace() - 1.0) > 1e-8) {
    throw std::invalid_argument("certificate: trace must be 1 within 1e-8");
  }
  if (cert.M.cwiseAbs().sum() > static_cast<double>(k) * (1.0 + 1e-6)) {
    throw std::invalid_argument("certificate: entrywise l1 norm exceeds k");
  }
  const double attained = std::abs((A.cwiseProduct(cert.M)).sum());
  if (std::abs(attained - cert.value) > 1e-8 * std::max(1e-300, std::max(attained, cert.value))) {
    throw std::invalid_argument("certificate: value does not match |A . M|");
  }
}

}  // namespace sparsemean
