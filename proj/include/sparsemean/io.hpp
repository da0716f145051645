#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sparsemean/genlab.hpp"
#include "sparsemean/types.hpp"

namespace sparsemean {

/// CSV: one sample per row, comma separated, no header.
DataMatrix read_csv(std::istream& in);
DataMatrix read_csv_file(const std::string& path);
void write_csv(const DataMatrix& m, std::ostream& out);

/// Binary: 8-byte magic "SPMEAN01", little-endian u64 n and d, then n*d
/// little-endian f64 values in row-major order.
DataMatrix read_binary(std::istream& in);
void write_binary(const DataMatrix& m, std::ostream& out);

/// Loads either format, sniffing the magic bytes.
DataMatrix load_data(const std::string& path);
void save_data_binary(const DataMatrix& m, const std::string& path);

/// JSON with exactly the EstimatorConfig field names.
EstimatorConfig estimator_config_from_json(const std::string& text);
std::string estimator_config_to_json(const EstimatorConfig& cfg);

std::string report_to_json(const EstimateReport& report);

/// Experiment description consumed by the simulate command. `ns` holds one or
/// more sample counts (a list in the JSON makes a sweep).
struct ExperimentConfig {
  CleanSpec clean;
  std::vector<Eigen::Index> ns;
  AdversarySpec adversary;
  EstimatorConfig estimator;
  int trials = 1;
  std::string output_path;
};

ExperimentConfig experiment_config_from_json(const std::string& text);

}  // namespace sparsemean
