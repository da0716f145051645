#include "sparsemean/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sparsemean {

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'S', 'P', 'M', 'E', 'A', 'N', '0', '1'};

void put_u64_le(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw std::invalid_argument("binary data: truncated header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

void put_f64_le(std::ostream& out, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  put_u64_le(out, v);
}

double get_f64_le(std::istream& in) {
  const std::uint64_t v = get_u64_le(in);
  double x;
  std::memcpy(&x, &v, 8);
  return x;
}

double parse_double(const std::string& tok, int line) {
  double out = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("csv: malformed number on line " + std::to_string(line));
  }
  return out;
}

}  // namespace

DataMatrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      const std::string tok = line.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      row.push_back(parse_double(tok, lineno));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("csv: ragged row on line " + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("csv: no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return DataMatrix::make(std::move(m));
}

DataMatrix read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open data file: " + path);
  return read_csv(in);
}

void write_csv(const DataMatrix& m, std::ostream& out) {
  char buf[64];
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    for (Eigen::Index j = 0; j < m.d(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.values(i, j));
      out << buf;
      out << (j + 1 < m.d() ? "," : "\n");
    }
  }
}

DataMatrix read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), 8);
  if (!in || magic != kMagic) throw std::invalid_argument("binary data: bad magic");
  const auto n = static_cast<Eigen::Index>(get_u64_le(in));
  const auto d = static_cast<Eigen::Index>(get_u64_le(in));
  if (n < 1 || d < 1 || n > (1ll << 40) || d > (1ll << 40)) {
    throw std::invalid_argument("binary data: implausible dimensions");
  }
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = get_f64_le(in);
  }
  if (!in) throw std::invalid_argument("binary data: truncated body");
  return DataMatrix::make(std::move(m));
}

void write_binary(const DataMatrix& m, std::ostream& out) {
  out.write(kMagic.data(), 8);
  put_u64_le(out, static_cast<std::uint64_t>(m.n()));
  put_u64_le(out, static_cast<std::uint64_t>(m.d()));
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    for (Eigen::Index j = 0; j < m.d(); ++j) put_f64_le(out, m.values(i, j));
  }
}

DataMatrix load_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open data file: " + path);
  std::array<char, 8> magic{};
  in.read(magic.data(), 8);
  const bool is_binary = in && magic == kMagic;
  in.clear();
  in.seekg(0);
  if (is_binary) return read_binary(in);
  return read_csv(in);
}

void save_data_binary(const DataMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  write_binary(m, out);
}

EstimatorConfig estimator_config_from_json(const std::string& text) {
  json j = json::parse(text);
  EstimatorConfig cfg;
  cfg.eps = j.value("eps", cfg.eps);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.k = j.value("k", cfg.k);
  cfg.group_factor = j.value("group_factor", cfg.group_factor);
  cfg.trunc_factor = j.value("trunc_factor", cfg.trunc_factor);
  cfg.stop_constant = j.value("stop_constant", cfg.stop_constant);
  cfg.max_filter_iters = j.value("max_filter_iters", cfg.max_filter_iters);
  cfg.solver_tol = j.value("solver_tol", cfg.solver_tol);
  cfg.solver_max_iters = j.value("solver_max_iters", cfg.solver_max_iters);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

std::string estimator_config_to_json(const EstimatorConfig& cfg) {
  json j;
  j["eps"] = cfg.eps;
  j["tau"] = cfg.tau;
  j["k"] = cfg.k;
  j["group_factor"] = cfg.group_factor;
  j["trunc_factor"] = cfg.trunc_factor;
  j["stop_constant"] = cfg.stop_constant;
  j["max_filter_iters"] = cfg.max_filter_iters;
  j["solver_tol"] = cfg.solver_tol;
  j["solver_max_iters"] = cfg.solver_max_iters;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

std::string report_to_json(const EstimateReport& report) {
  json j;
  j["mu_hat"] = std::vector<double>(report.mu_hat.data(), report.mu_hat.data() + report.mu_hat.size());
  j["mu_tilde"] = std::vector<double>(report.mu_tilde.data(), report.mu_tilde.data() + report.mu_tilde.size());
  j["sigma"] = report.sigma;
  j["removed_mass"] = report.removed_mass;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["warnings"] = report.warnings;
  if (report.error_2k.has_value()) j["error_2k"] = *report.error_2k;
  return j.dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig cfg;

  const json& c = j.at("clean");
  cfg.clean.family = clean_family_from_string(c.at("family").get<std::string>());
  cfg.clean.d = c.at("d").get<Eigen::Index>();
  cfg.clean.k = c.at("k").get<int>();
  cfg.clean.seed = c.value("seed", std::uint64_t{0});
  if (c.at("n").is_array()) {
    cfg.ns = c.at("n").get<std::vector<Eigen::Index>>();
  } else {
    cfg.ns = {c.at("n").get<Eigen::Index>()};
  }
  if (cfg.ns.empty()) throw std::invalid_argument("experiment: empty n list");
  if (c.contains("params")) {
    const json& p = c.at("params");
    cfg.clean.mag = p.value("mag", cfg.clean.mag);
    cfg.clean.sd = p.value("sd", cfg.clean.sd);
    cfg.clean.t = p.value("t", cfg.clean.t);
    cfg.clean.dof = p.value("dof", cfg.clean.dof);
  }

  if (j.contains("adversary")) {
    const json& a = j.at("adversary");
    cfg.adversary.kind = adversary_kind_from_string(a.value("kind", std::string("none")));
    cfg.adversary.eps = a.value("eps", 0.0);
    if (a.contains("params")) {
      const json& p = a.at("params");
      cfg.adversary.scale = p.value("scale", cfg.adversary.scale);
      cfg.adversary.range = p.value("range", cfg.adversary.range);
    }
  }

  cfg.estimator = estimator_config_from_json(j.at("estimator").dump());
  cfg.trials = j.value("trials", 1);
  if (cfg.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  cfg.output_path = j.value("output_path", std::string());
  return cfg;
}

}  // namespace sparsemean
