#pragma once

#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rsh/core.hpp"
#include "rsh/data.hpp"
#include "rsh/hashers.hpp"

namespace rsh {

/// Number of positions where the symbols differ.
std::size_t symbol_hamming(const CodeWord& a, const CodeWord& b);

/// sum_l theta_l * [a_l == b_l]
double weighted_similarity(const CodeWord& a, const CodeWord& b, std::span<const double> theta);

struct PackedCodeHash {
  std::size_t operator()(const PackedCode& c) const noexcept;
};

/// Buckets of database ids keyed by their packed code.
class HashTable {
 public:
  struct Bucket {
    CodeWord code;
    std::vector<Id> ids;
  };

  HashTable(std::span<const CodeWord> codes, std::span<const Id> ids, std::size_t K);

  std::size_t length() const { return L_; }
  std::size_t subspaces() const { return K_; }
  std::size_t bucket_count() const { return buckets_.size(); }
  std::size_t size() const { return size_; }
  const std::unordered_map<PackedCode, Bucket, PackedCodeHash>& buckets() const { return buckets_; }

  /// Ids whose codes lie within symbol-Hamming distance R, ascending. Picks
  /// neighborhood expansion or a bucket scan, whichever touches fewer keys.
  std::vector<Id> lookup(const CodeWord& query, std::size_t R) const;

  /// Probes every code at distance <= R from the query.
  std::vector<Id> lookup_by_expansion(const CodeWord& query, std::size_t R) const;

  /// Checks every bucket's code against the query.
  std::vector<Id> lookup_by_scan(const CodeWord& query, std::size_t R) const;

  /// sum_{r <= R} C(L, r) (K - 1)^r, saturating.
  double ball_volume(std::size_t R) const;

 private:
  std::size_t L_;
  std::size_t K_;
  std::size_t size_ = 0;
  std::unordered_map<PackedCode, Bucket, PackedCodeHash> buckets_;
};

HashTable build_table(std::span<const CodeWord> codes, std::span<const Id> ids, std::size_t K);

/// Top k ids by ascending symbol-Hamming distance, ties by ascending id.
std::vector<Id> knn_hamming(std::span<const CodeWord> codes, std::span<const Id> ids,
                            const CodeWord& query, std::size_t k);

/// Top k ids by descending weighted similarity, ties by ascending id.
std::vector<Id> knn_weighted(std::span<const CodeWord> codes, std::span<const Id> ids,
                             const CodeWord& query, std::span<const double> theta, std::size_t k);

/// |retrieved ∩ relevant| / |retrieved|; nullopt when nothing was retrieved.
std::optional<double> precision(std::span<const Id> retrieved, std::span<const Id> relevant);

/// |retrieved ∩ relevant| / |relevant|; nullopt when nothing is relevant.
std::optional<double> recall(std::span<const Id> retrieved, std::span<const Id> relevant);

struct RetrievalResult {
  Id query = 0;
  std::vector<Id> retrieved;
  std::size_t relevant_count = 0;
  std::optional<double> precision;
  std::optional<double> recall;
};

RetrievalResult lookup_query(const HashTable& table, Id query_id, const CodeWord& query,
                             std::span<const Id> relevant, std::size_t R);

struct PrPoint {
  std::size_t radius = 0;
  std::optional<double> precision;  ///< mean over queries with a non-empty result
  double recall = 0.0;              ///< mean over all evaluated queries
  std::size_t answered = 0;         ///< queries with a non-empty result
};

/// Sweeps R = 0..L over the database codes. Queries without any relevant item
/// are skipped.
std::vector<PrPoint> pr_curve_by_radius(std::span<const CodeWord> db_codes,
                                        std::span<const Id> db_ids,
                                        std::span<const CodeWord> query_codes,
                                        const GroundTruth& gt);

/// sum_R (recall_R - recall_{R-1}) * precision_R with recall_{-1} = 0; a
/// radius with no answered query contributes nothing.
double average_precision(std::span<const PrPoint> curve);

struct RetrievalMetrics {
  std::map<std::size_t, double> precision_at_radius;  ///< 0 when no query was answered
  std::map<std::size_t, double> precision_at_k;
  double average_precision = 0.0;
  std::vector<PrPoint> curve;
  std::size_t evaluated_queries = 0;
};

/// Lookup precision at each radius, kNN precision at each k (weighted ranking
/// when theta is given), and AP over the radius sweep.
RetrievalMetrics evaluate_retrieval(std::span<const CodeWord> db_codes, std::span<const Id> db_ids,
                                    std::span<const CodeWord> query_codes, const GroundTruth& gt,
                                    std::span<const std::size_t> radii,
                                    std::span<const std::size_t> ks,
                                    std::optional<std::span<const double>> theta = std::nullopt);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Sample mean and standard deviation (n - 1 divisor; 0 for a single value).
MeanStd aggregate_runs(std::span<const double> values);

}  // namespace rsh
