#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsemean/diagnostics.hpp"
#include "sparsemean/genlab.hpp"
#include "sparsemean/io.hpp"
#include "sparsemean/pipeline.hpp"
#include "sparsemean/preprocess.hpp"
#include "sparsemean/rng.hpp"
#include "sparsemean/xk_norm.hpp"

namespace {

using namespace sparsemean;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::uint64_t> seed_override() {
  const char* env = std::getenv("SPARSEMEAN_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::strtoull(env, nullptr, 10);
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output file: " + path);
  return file;
}

double median_of(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid - 1),
                   v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (v[mid - 1] + hi);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int cmd_estimate(const std::string& data_path, const std::string& config_path,
                 const std::string& output_path) {
  const DataMatrix data = load_data(data_path);
  EstimatorConfig cfg = estimator_config_from_json(slurp(config_path));
  if (auto s = seed_override()) cfg.seed = *s;

  const PipelineResult result = robust_sparse_mean(data, cfg);
  std::ofstream file;
  std::ostream& out = open_output(file, output_path);
  out << report_to_json(result.report) << "\n";
  if (!result.report.converged || !result.report.warnings.empty()) return 2;
  return 0;
}

struct TrialRow {
  std::uint64_t seed = 0;
  Eigen::Index n = 0, d = 0;
  int k = 0;
  double eps = 0.0;
  double err_filtered = 0.0, err_plain = 0.0, err_comom = 0.0;
  double removed_mass = 0.0;
  long runtime_ms = 0;
};

TrialRow run_trial(const ExperimentConfig& exp, Eigen::Index n, int trial) {
  CleanSpec spec = exp.clean;
  spec.n = n;
  spec.seed = exp.clean.seed + static_cast<std::uint64_t>(trial);
  EstimatorConfig cfg = exp.estimator;
  cfg.seed = spec.seed;

  const auto start = std::chrono::steady_clock::now();
  auto [clean, mu_true] = sample_clean(spec);
  const DataMatrix data = corrupt(clean, mu_true, exp.adversary, spec.k,
                                  rng::derive(spec.seed, 0xadu));

  const PipelineResult result = robust_sparse_mean(data, cfg);

  // baselines from one file: the unfiltered mean and the coordinate-wise
  // median-of-means alone
  const Eigen::VectorXd plain = data.values.colwise().mean().transpose();
  Eigen::Index buckets = static_cast<Eigen::Index>(
      std::ceil(8.0 * (0.01 * static_cast<double>(n) +
                       std::log(2.0 * static_cast<double>(data.d()) / cfg.tau))));
  buckets = std::max<Eigen::Index>(1, std::min(buckets, n));
  const Eigen::VectorXd comom =
      coordinatewise_median_of_means(data, buckets, rng::derive(spec.seed, 2));
  const auto stop = std::chrono::steady_clock::now();

  TrialRow row;
  row.seed = spec.seed;
  row.n = n;
  row.d = spec.d;
  row.k = spec.k;
  row.eps = exp.adversary.eps;
  row.err_filtered = error_2k(result.report.mu_hat, mu_true, spec.k);
  row.err_plain = error_2k(plain, mu_true, spec.k);
  row.err_comom = error_2k(comom, mu_true, spec.k);
  row.removed_mass = result.report.removed_mass;
  row.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
  return row;
}

int cmd_simulate(const std::string& config_path, int jobs, const std::string& output_override,
                 bool stable_output) {
  ExperimentConfig exp = experiment_config_from_json(slurp(config_path));
  if (auto s = seed_override()) {
    exp.clean.seed = *s;
    exp.estimator.seed = *s;
  }
  const std::string out_path = output_override.empty() ? exp.output_path : output_override;

  std::ofstream file;
  std::ostream& out = open_output(file, out_path);
  out << "seed,n,d,k,eps,error_2k_filtered,error_2k_plain_mean,error_2k_comom,"
         "removed_mass,runtime_ms\n";

  for (const Eigen::Index n : exp.ns) {
    std::vector<TrialRow> rows(static_cast<std::size_t>(exp.trials));
    std::atomic<int> next{0};
    const int workers = std::max(1, std::min(jobs, exp.trials));
    auto work = [&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= exp.trials) break;
        rows[static_cast<std::size_t>(t)] = run_trial(exp, n, t);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }

    std::vector<double> ef, ep, ec, rm;
    for (const auto& r : rows) {
      out << r.seed << "," << r.n << "," << r.d << "," << r.k << "," << fmt(r.eps) << ","
          << fmt(r.err_filtered) << "," << fmt(r.err_plain) << "," << fmt(r.err_comom) << ","
          << fmt(r.removed_mass) << "," << (stable_output ? 0L : r.runtime_ms) << "\n";
      ef.push_back(r.err_filtered);
      ep.push_back(r.err_plain);
      ec.push_back(r.err_comom);
      rm.push_back(r.removed_mass);
    }
    out << "median," << n << "," << exp.clean.d << "," << exp.clean.k << ","
        << fmt(exp.adversary.eps) << "," << fmt(median_of(ef)) << "," << fmt(median_of(ep))
        << "," << fmt(median_of(ec)) << "," << fmt(median_of(rm)) << ",0\n";
  }
  return 0;
}

int cmd_diagnose(const std::string& data_path, const std::string& mode,
                 const std::string& config_path, const std::string& output_path) {
  const DataMatrix data = load_data(data_path);
  json params = json::object();
  if (!config_path.empty()) params = json::parse(slurp(config_path));

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(data.d());
  if (params.contains("mu")) {
    const auto v = params.at("mu").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != data.d()) {
      throw std::invalid_argument("diagnose: mu dimension mismatch");
    }
    mu = Eigen::Map<const Eigen::VectorXd>(v.data(), data.d());
  }

  json verdict;
  if (mode == "xk") {
    const int k = params.value("k", 1);
    const XkCertificate cert = xk_norm(data.values, k);
    verdict["mode"] = "xk";
    verdict["k"] = k;
    verdict["value"] = cert.value;
    verdict["entrywise_bound"] = xk_entrywise_bound(data.values, k);
  } else if (mode == "stability") {
    const double sigma = params.value("sigma", 1.0);
    const double eps = params.value("eps", 0.1);
    const double delta = params.value("delta", 1.0);
    const int k = params.value("k", 1);
    const StabilityVerdict v = check_stability(data, mu, sigma, eps, delta, k);
    verdict["mode"] = "stability";
    verdict["stable"] = v.stable;
    verdict["worst_subset"] = v.worst_subset;
    verdict["worst_mean_dev"] = v.worst_mean_dev;
    verdict["worst_cov_dev"] = v.worst_cov_dev;
  } else if (mode == "regularity") {
    const double a = params.value("a", 1.0);
    const double alpha = params.value("alpha", 0.1);
    const RegularityResult r = check_coordinate_regularity(data, mu, a, alpha);
    verdict["mode"] = "regularity";
    verdict["feasible"] = r.feasible;
    verdict["subset_size"] = r.subset.size();
  } else {
    throw std::invalid_argument("diagnose: mode must be one of stability, regularity, xk");
  }

  std::ofstream file;
  std::ostream& out = open_output(file, output_path);
  out << verdict.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outlier-robust sparse mean estimation for heavy-tailed data"};
  app.require_subcommand(1);

  std::string data_path, config_path, output_path, mode;
  int jobs = 1;
  bool stable_output = false;

  auto* estimate = app.add_subcommand("estimate", "Run the estimator on a data file");
  estimate->add_option("--data", data_path, "CSV or binary sample file")->required();
  estimate->add_option("--config", config_path, "estimator config JSON")->required();
  estimate->add_option("--output", output_path, "report destination (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Seeded simulation trials to CSV");
  simulate->add_option("--config", config_path, "experiment config JSON")->required();
  simulate->add_option("--jobs", jobs, "concurrent trials")->check(CLI::PositiveNumber);
  simulate->add_option("--output", output_path, "CSV destination (overrides config)");
  simulate->add_flag("--stable-output", stable_output,
                     "write runtime_ms as 0 for reproducible files");

  auto* diagnose = app.add_subcommand("diagnose", "Stability / regularity / xk oracles");
  diagnose->add_option("--data", data_path, "CSV or binary input")->required();
  diagnose->add_option("--mode", mode, "stability | regularity | xk")->required();
  diagnose->add_option("--config", config_path, "oracle parameters JSON");
  diagnose->add_option("--output", output_path, "verdict destination (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return cmd_estimate(data_path, config_path, output_path);
    if (simulate->parsed()) return cmd_simulate(config_path, jobs, output_path, stable_output);
    return cmd_diagnose(data_path, mode, config_path, output_path);
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
