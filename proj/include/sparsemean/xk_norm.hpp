#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sparsemean/types.hpp"

namespace sparsemean {

struct XkSolverOptions {
  double tol = 1e-4;  // stagnation tolerance, relative to ||A||_F
  std::int64_t max_iters = 2000;
  int restarts = 3;
  std::uint64_t seed = 0x5eedull;
};

/// Maximizes |A . M| over PSD M with trace 1 and entrywise l1 norm at most k.
///
/// Conditional-gradient scheme over the spectrahedron: every candidate step is
/// the outer product of a k-sparse unit vector (obtained from a penalized
/// linear minimization oracle that soft-thresholds the gradient, plus
/// truncated power refinements and seeded restarts), so feasibility of the
/// returned certificate is exact by construction. Both A and -A are maximized
/// and the better value is returned. The value is a lower bound on the true
/// supremum; `xk_entrywise_bound` gives a certified upper bound.
XkCertificate xk_norm(const Eigen::MatrixXd& A, int k, const XkSolverOptions& opts = {});

/// Certified upper bound max_i |A_ii| + k * max_{i != j} |A_ij|.
double xk_entrywise_bound(const Eigen::MatrixXd& A, int k);

struct SparseEigResult {
  double value = 0.0;
  std::vector<Eigen::Index> support;
  Eigen::VectorXd vector;  // embedded in R^d, unit norm
};

/// Exhaustive maximum of v^T A v over k-sparse unit vectors: enumerates all
/// C(d, k) supports and takes the top eigenvalue of each principal submatrix.
/// Refuses (CapacityError) when C(d, k) > 10^6.
SparseEigResult sparse_max_eigenvalue_bruteforce(const Eigen::MatrixXd& A, int k);

/// Checks the certificate feasibility invariants against the query matrix:
/// PSD up to -1e-8 ||M||_F, |tr M - 1| <= 1e-8, ||M||_1 <= k (1 + 1e-6) and
/// |A . M| matching `value` to 1e-8 relative. Throws on violation.
void validate_certificate(const XkCertificate& cert, const Eigen::MatrixXd& A, int k);

}  // namespace sparsemean
