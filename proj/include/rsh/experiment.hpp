#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rsh/config.hpp"
#include "rsh/data.hpp"
#include "rsh/eval.hpp"
#include "rsh/learning.hpp"

namespace rsh {

// Independent random streams derived from one run seed.
enum class Stream : std::uint64_t {
  Synthetic = 1,
  Split = 2,
  Pairs = 3,
  Training = 4,
  Wta = 5,
  Lsh = 6,
};

std::uint64_t stream_seed(std::uint64_t run_seed, Stream stream);

/// Seed of the run-th repetition of an experiment.
std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run);

struct PreparedData {
  Dataset train;
  Dataset query;
  std::vector<int> train_labels;  ///< empty without labels
  std::vector<int> query_labels;
  Preprocessor preprocessor;
  Split split;
  std::size_t raw_rows = 0;
  std::size_t raw_dim = 0;
};

/// Loads or generates the raw data, splits it with the Split stream of
/// `seed`, fits preprocessing on the training rows and applies it to both.
PreparedData prepare_data(const ExperimentConfig& config, std::uint64_t seed);

struct Supervision {
  GroundTruth query_truth;  ///< queries against the training database
  GroundTruth train_truth;  ///< training rows against themselves, for validation
  PairSet pairs;
};

Supervision build_supervision(const ExperimentConfig& config, const PreparedData& data,
                              std::uint64_t seed);

struct CellParams {
  std::size_t K = 4;
  double rho = 1.0;
  double lambda = 1.0;

  friend bool operator==(const CellParams&, const CellParams&) = default;
};

/// Grid cells to try for a learned method: the full K x rho x lambda grid when
/// sweeping, otherwise the single configured cell.
std::vector<CellParams> grid_cells(const ExperimentConfig& config);

struct RunResult {
  std::string method;
  std::size_t L = 0;     ///< hash functions (LSH: hyperplanes)
  std::size_t bits = 0;  ///< L * ceil(log2 K), the comparison budget
  std::size_t K = 0;
  CellParams cell;
  std::size_t run = 0;
  RetrievalMetrics test;
  double validation_ap = 0.0;
};

/// Trains (or samples) one method at code length L and evaluates it.
RunResult run_method(const ExperimentConfig& config, const std::string& method, std::size_t L,
                     const CellParams& cell, const PreparedData& data, const Supervision& sup,
                     std::size_t run);

/// Evaluates already-built codes.
RunResult evaluate_codes(const ExperimentConfig& config, const std::string& method,
                         std::size_t L, std::size_t K, std::size_t bits, const CellParams& cell,
                         const PreparedData& data, const Supervision& sup, std::size_t run,
                         const std::vector<CodeWord>& train_codes,
                         const std::vector<CodeWord>& query_codes,
                         const std::optional<std::vector<double>>& theta);

/// Keeps, for each (method, L), only the runs of the cell with the best mean
/// validation AP. Order of the surviving runs is preserved.
std::vector<RunResult> select_best_cells(const std::vector<RunResult>& runs);

struct MetricRow {
  std::string method;
  std::size_t bits = 0;
  std::size_t K = 0;
  std::string seed;  ///< run index, or "mean" / "std"
  std::string metric;
  double value = 0.0;
};

/// Per-run rows followed by mean/std rows for every (method, L) group.
std::vector<MetricRow> metric_rows(const ExperimentConfig& config,
                                   const std::vector<RunResult>& runs);

/// `method,L_bits,K,seed,metric,value`
std::string metrics_csv(const std::vector<MetricRow>& rows);

/// mean/std per (method, bits, metric) plus the selected cell.
std::string summary_json(const ExperimentConfig& config, const std::vector<RunResult>& runs);

struct BenchmarkReport {
  std::vector<RunResult> runs;  ///< selected runs only
  std::vector<MetricRow> rows;
};

/// Sweeps L_list for every configured method over `seeds` independent runs.
BenchmarkReport run_benchmark(const ExperimentConfig& config);

// CLI commands. Each is a pure function of (config, input files).
void cmd_preprocess(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_train(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_eval(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_benchmark(const ExperimentConfig& config, const std::filesystem::path& out);

/// Preprocessing transform file ("RSHP1"): mean, optional PCA basis, flags.
std::string encode_preprocessor(const Preprocessor& p);
Preprocessor parse_preprocessor(std::string_view bytes);

}  // namespace rsh
