#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sparsemean/io.hpp"
#include "sparsemean/rng.hpp"
#include "sparsemean/types.hpp"

using namespace sparsemean;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("l2k_norm on pinned examples") {
  CHECK(l2k_norm(vec({3, -4, 1, 0}), 2) == doctest::Approx(5.0).epsilon(1e-12));
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(7, 0);
  CHECK(l2k_norm(e1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l2k_norm(vec({1, 1, 1, 1}), 4) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("l2k_norm rejects k out of range") {
  CHECK_THROWS_AS(l2k_norm(vec({1, 2}), 0), std::invalid_argument);
  CHECK_THROWS_AS(l2k_norm(vec({1, 2}), 3), std::invalid_argument);
}

TEST_CASE("hard_threshold_topk on pinned examples") {
  const Eigen::VectorXd a = hard_threshold_topk(vec({3, -4, 1, 0}), 1);
  CHECK(a == vec({0, -4, 0, 0}));
  CHECK(hard_threshold_topk(vec({0, 0}), 2) == vec({0, 0}));
  // tie at entries 0 and 1 is broken by the lower index
  CHECK(hard_threshold_topk(vec({2, 2, 1}), 2) == vec({2, 2, 0}));
}

TEST_CASE("hard_threshold_topk is idempotent and consistent with l2k_norm") {
  rng::Sampler sampler(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 3 + static_cast<int>(sampler.uniform_index(12));
    const int k = 1 + static_cast<int>(sampler.uniform_index(static_cast<std::uint64_t>(d)));
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = sampler.normal();
    const Eigen::VectorXd t = hard_threshold_topk(v, k);
    CHECK((hard_threshold_topk(t, k) - t).norm() == 0.0);
    CHECK((t.array() != 0.0).count() <= k);
    CHECK(l2k_norm(v, k) == doctest::Approx(t.norm()).epsilon(1e-12));
    CHECK(l2k_norm(v, k) <= v.norm() + 1e-12);
  }
}

TEST_CASE("l2k_norm triangle inequality") {
  rng::Sampler sampler(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(sampler.uniform_index(10));
    const int k = 1 + static_cast<int>(sampler.uniform_index(static_cast<std::uint64_t>(d)));
    Eigen::VectorXd u(d), v(d);
    for (int i = 0; i < d; ++i) {
      u[i] = sampler.normal();
      v[i] = sampler.normal();
    }
    CHECK(l2k_norm(u + v, k) <= l2k_norm(u, k) + l2k_norm(v, k) + 1e-12);
  }
}

TEST_CASE("top-k rounding of a near-estimate loses at most a factor 3") {
  rng::Sampler sampler(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 4 + static_cast<int>(sampler.uniform_index(20));
    const int k = 1 + static_cast<int>(sampler.uniform_index(static_cast<std::uint64_t>(d)));
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    for (auto idx : sampler.sample_without_replacement(d, k)) mu[idx] = 3.0 * sampler.normal();
    Eigen::VectorXd approx = mu;
    for (int i = 0; i < d; ++i) approx[i] += 0.5 * sampler.normal();
    const double lhs = (hard_threshold_topk(approx, k) - mu).norm();
    CHECK(lhs <= 3.0 * l2k_norm(approx - mu, k) + 1e-12);
  }
}

TEST_CASE("DataMatrix validation") {
  CHECK_THROWS_AS(DataMatrix::make(Eigen::MatrixXd(0, 3)), std::invalid_argument);
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, std::nan(""), 4;
  CHECK_THROWS_AS(DataMatrix::make(bad), std::invalid_argument);
}

TEST_CASE("WeightVector simplex membership") {
  WeightVector w;
  w.w = Eigen::VectorXd::Constant(10, 0.1);
  CHECK(w.in_delta(0.1));
  w.w[0] = 1.0 / (0.9 * 10.0) + 1e-3;  // above the per-weight cap
  CHECK_FALSE(w.in_delta(0.1));
  w.w = Eigen::VectorXd::Constant(10, 0.05);  // sums to 0.5
  CHECK_FALSE(w.in_delta(0.1));
  w.w = -Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}

TEST_CASE("EstimatorConfig validation") {
  EstimatorConfig cfg;
  cfg.k = 2;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps = 0.6;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eps = 0.01;
  CHECK_THROWS_AS(cfg.validate(50), std::invalid_argument);  // eps * n < 1
  CHECK_NOTHROW(cfg.validate(100));
}

TEST_CASE("CSV and binary round trips preserve values") {
  rng::Sampler sampler(17);
  Eigen::MatrixXd m(5, 3);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = sampler.normal() * 1e3;
  m(0, 0) = 1.0 / 3.0;
  const DataMatrix dm{m};

  std::stringstream csv;
  write_csv(dm, csv);
  const DataMatrix back_csv = read_csv(csv);
  CHECK((back_csv.values - m).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_binary(dm, bin);
  const DataMatrix back_bin = read_binary(bin);
  CHECK((back_bin.values - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binary header layout is pinned") {
  Eigen::MatrixXd m(1, 2);
  m << 1.0, 2.0;
  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_binary(DataMatrix{m}, bin);
  const std::string bytes = bin.str();
  REQUIRE(bytes.size() == 8 + 8 + 8 + 16);
  CHECK(bytes.substr(0, 8) == "SPMEAN01");
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);   // n = 1, little endian
  CHECK(static_cast<unsigned char>(bytes[16]) == 2);  // d = 2
  for (int i = 9; i < 16; ++i) CHECK(bytes[static_cast<std::size_t>(i)] == 0);
}

TEST_CASE("CSV rejects malformed input") {
  std::stringstream ss("1,2\n3,oops\n");
  CHECK_THROWS_AS(read_csv(ss), std::invalid_argument);
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), std::invalid_argument);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), std::invalid_argument);
}
