#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsh/core.hpp"

namespace rsh {

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

/// Comma-separated numeric rows. A first line that does not parse as numbers
/// is treated as a header. Blank lines are skipped. Row ids are 0..N-1.
Dataset parse_csv(std::string_view text);
Dataset load_csv(const std::string& path);

// RSHV1 vector file: the 5-byte magic "RSHV1", N and d as u64 little-endian,
// then N*d float32 little-endian values, row-major.
inline constexpr std::string_view kVectorMagic = "RSHV1";

Dataset parse_fvec(std::string_view bytes);
std::string encode_fvec(const Dataset& data);
Dataset load_fvec(const std::string& path);
void save_fvec(const Dataset& data, const std::string& path);

/// Dispatches on the file contents: RSHV1 magic, otherwise CSV.
Dataset load_dataset(const std::string& path);

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

Vector column_mean(const Dataset& data);

/// Scales every row to unit Euclidean norm; zero rows stay zero.
Dataset normalize_rows(const Dataset& data);

/// Subtracts `mean` from every row, then normalizes rows.
Dataset apply_center_and_normalize(const Dataset& data, const Vector& mean);

/// Fits the mean on `data` and applies apply_center_and_normalize. The mean is
/// returned so queries can be transformed with the training statistics.
std::pair<Dataset, Vector> center_and_normalize(const Dataset& data);

struct PcaBasis {
  Vector mean;
  Matrix components;  ///< m x d, orthonormal rows, eigenvalue-descending
  Vector eigenvalues;

  std::size_t dims() const { return static_cast<std::size_t>(components.rows()); }
};

/// Top-m eigenvectors of the sample covariance. Each component is signed so
/// its largest-magnitude entry is positive.
PcaBasis fit_pca(const Dataset& data, std::size_t m);

/// (x - mean) * components^T for every row.
Dataset apply_pca(const PcaBasis& basis, const Dataset& data);

/// The full transform fitted on training data and reused verbatim for
/// queries: center with the training mean, optionally project onto PCA
/// components fitted on the centered training rows, optionally normalize.
struct Preprocessor {
  Vector mean;
  std::optional<PcaBasis> pca;
  bool normalize = true;

  static Preprocessor fit(const Dataset& train, bool center, std::size_t pca_dims, bool normalize);
  Dataset apply(const Dataset& data) const;
};

// ---------------------------------------------------------------------------
// Groundtruth and supervision
// ---------------------------------------------------------------------------

struct GroundTruth {
  std::vector<std::vector<Id>> neighbor_lists;  ///< per query, database ids in ascending row order
  double threshold = 0.0;                       ///< Euclidean cutoff (0 for label-based truth)

  double mean_count() const;
};

/// Neighbors are database points within Euclidean distance `threshold`.
GroundTruth groundtruth_at_threshold(const Dataset& db, const Dataset& queries, double threshold);

/// Picks the threshold as the round(target_avg * Q)-th smallest pooled
/// query-database distance, so queries average about target_avg neighbors.
GroundTruth calibrate_groundtruth(const Dataset& db, const Dataset& queries, double target_avg);

/// Neighbors are database points sharing the query's class label.
GroundTruth groundtruth_by_label(const Dataset& db, std::span<const int> db_labels,
                                 std::span<const int> query_labels);

/// Samples up to max_pairs distinct pairs, aiming for pos_fraction positives
/// (s = 1 iff Euclidean distance <= threshold) and topping up from the other
/// class when one runs short. Output is sorted by (i, j).
PairSet make_pairs(const Dataset& db, double threshold, std::size_t max_pairs, double pos_fraction,
                   Rng& rng);

/// As make_pairs, with s = 1 iff the two rows share a class label.
PairSet make_pairs_by_label(std::span<const int> labels, std::size_t max_pairs,
                            double pos_fraction, Rng& rng);

struct SyntheticClusters {
  Dataset data;
  std::vector<int> labels;
  Matrix centers;
};

/// Gaussian blobs around centers that are pairwise `separation` apart (exactly,
/// when n_clusters <= d; at least, otherwise).
SyntheticClusters synth_clusters(std::size_t n_clusters, std::size_t per_cluster, std::size_t d,
                                 double separation, double noise_sigma, Rng& rng);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> query;
};

/// Disjoint random train/query row subsets, each in ascending row order.
Split random_split(std::size_t n, std::size_t train_count, std::size_t query_count, Rng& rng);

}  // namespace rsh
