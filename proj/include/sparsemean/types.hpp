#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sparsemean {

// Thrown when a brute-force oracle would exceed its enumeration budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when the filter can no longer produce an estimate (all mass removed).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n x d sample set, one sample per row. Entries must be finite.
struct DataMatrix {
  Eigen::MatrixXd values;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index d() const { return values.cols(); }

  /// Validates n >= 1, d >= 1 and finiteness; throws std::invalid_argument.
  static DataMatrix make(Eigen::MatrixXd m);
};

/// Per-sample nonnegative weights; the filter's mutable state.
struct WeightVector {
  Eigen::VectorXd w;

  Eigen::Index n() const { return w.size(); }
  double total() const { return w.sum(); }

  /// Throws unless all weights are >= 0 and the total is positive.
  void validate() const;

  /// Membership in Delta_{n,eps}: w_i <= 1/((1-eps) n) and sum(w) = 1,
  /// both up to `tol`.
  bool in_delta(double eps, double tol = 1e-9) const;
};

/// All tunables of the estimation pipeline and the filter.
struct EstimatorConfig {
  double eps = 0.01;             // corruption fraction, in (0, 0.01]
  double tau = 0.1;              // failure probability, in (0, 1)
  int k = 1;                     // sparsity, in [1, d]
  double group_factor = 100.0;   // g = floor(group_factor * eps * n)
  double trunc_factor = 4.0;     // truncation radius = trunc_factor * sigma * sqrt(k)
  double stop_constant = 1.4;    // filter stops once the certificate value <= stop_constant * sigma^2
  std::int64_t max_filter_iters = 0;  // 0 means "number of samples"
  double solver_tol = 1e-4;      // relative to ||A||_F
  std::int64_t solver_max_iters = 2000;
  std::uint64_t seed = 0;

  /// Validates ranges; if n_for >= 0 additionally requires eps * n >= 1.
  void validate(Eigen::Index n_for = -1) const;
};

/// Feasible point of the trace-1, l1-bounded PSD set together with the
/// attained objective value. `direction` is set when M = v v^T.
struct XkCertificate {
  Eigen::MatrixXd M;
  double value = 0.0;
  Eigen::VectorXd direction;
};

/// Output of the full pipeline: the estimate plus per-stage artifacts.
struct EstimateReport {
  Eigen::VectorXd mu_hat;
  Eigen::VectorXd mu_tilde;    // coordinate-wise median-of-means stage
  double sigma = 0.0;          // 1/sqrt(m) from the grouping stage
  double removed_mass = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
  std::optional<double> error_2k;  // filled when ground truth is known
};

/// l2 norm of the k largest-magnitude entries of v. Equals ||v||_2 at k = d.
double l2k_norm(const Eigen::VectorXd& v, int k);

/// Zeroes all but the k largest-magnitude entries; ties keep the lowest index.
Eigen::VectorXd hard_threshold_topk(const Eigen::VectorXd& v, int k);

/// Indices of the k largest-magnitude entries, ties broken by lowest index.
std::vector<Eigen::Index> topk_magnitude_indices(const Eigen::VectorXd& v, int k);

}  // namespace sparsemean
