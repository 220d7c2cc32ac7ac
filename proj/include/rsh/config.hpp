#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rsh/core.hpp"

namespace rsh {

/// Everything an experiment needs. Parsed from a flat `key = value` file;
/// `#` starts a comment, list values are comma-separated.
struct ExperimentConfig {
  // Input: a CSV or RSHV1 file, or generated clusters.
  std::string input;
  std::string labels;  ///< optional file with one integer class label per input row
  bool synthetic = false;
  std::size_t synth_clusters = 4;
  std::size_t synth_per_cluster = 250;
  std::size_t synth_dim = 16;
  double synth_separation = 10.0;
  double synth_noise = 1.0;

  std::size_t train_count = 1000;
  std::size_t query_count = 3000;

  bool center = true;
  bool normalize = true;
  std::size_t pca_dims = 0;  ///< 0 disables PCA

  std::string groundtruth = "threshold";  ///< "threshold" or "label"
  double target_neighbors = 50.0;
  std::size_t max_pairs = 20000;
  double pos_fraction = 0.3;

  std::vector<std::string> methods = {"rsh", "srsh", "wta", "lsh"};
  Hyperparams hyper;

  bool sweep = false;
  std::vector<double> rho_grid = {0.5, 1.0, 2.0};
  std::vector<double> lambda_grid = {0.5, 1.0, 2.0};
  std::vector<std::size_t> K_grid = {2, 4, 8};

  std::vector<std::size_t> L_list = {8, 16, 32};
  std::size_t wta_K = 4;

  std::vector<std::size_t> radii = {2, 3};
  std::vector<std::size_t> knn = {50, 100};
  std::size_t seeds = 10;

  std::string data_dir;   ///< preprocess output read by train/eval (default: --out)
  std::string model_dir;  ///< train output read by eval (default: --out)

  /// Throws Error(Config) naming the offending field.
  void validate() const;

  /// Canonical `key = value` listing of every field; parse_config(to_text())
  /// reproduces the config.
  std::string to_text() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace rsh
