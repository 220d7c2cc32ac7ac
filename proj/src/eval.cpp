#include "rsh/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "rsh/kernels.hpp"

namespace rsh {

namespace {

void check_lengths(const CodeWord& a, const CodeWord& b, const char* where) {
  require(a.size() == b.size(), ErrorKind::DimensionMismatch,
          std::string(where) + ": code lengths " + std::to_string(a.size()) + " and " +
              std::to_string(b.size()) + " differ");
}

void check_ids(std::span<const CodeWord> codes, std::span<const Id> ids) {
  require(codes.size() == ids.size(), ErrorKind::DimensionMismatch,
          "one id per database code required");
}

std::size_t count_hits(std::span<const Id> retrieved, std::span<const Id> relevant) {
  std::unordered_set<Id> rel(relevant.begin(), relevant.end());
  std::size_t hits = 0;
  for (Id id : retrieved) hits += rel.count(id);
  return hits;
}

}  // namespace

std::size_t symbol_hamming(const CodeWord& a, const CodeWord& b) {
  check_lengths(a, b, "symbol_hamming");
  std::size_t d = 0;
  for (std::size_t l = 0; l < a.size(); ++l) d += a[l] != b[l];
  return d;
}

double weighted_similarity(const CodeWord& a, const CodeWord& b, std::span<const double> theta) {
  check_lengths(a, b, "weighted_similarity");
  require(theta.size() == a.size(), ErrorKind::DimensionMismatch,
          "weighted_similarity: one weight per position required");
  double sim = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l] == b[l]) sim += theta[l];
  }
  return sim;
}

std::size_t PackedCodeHash::operator()(const PackedCode& c) const noexcept {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL ^ c.bit_count;
  for (auto byte : c.bytes) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

HashTable::HashTable(std::span<const CodeWord> codes, std::span<const Id> ids, std::size_t K)
    : L_(codes.empty() ? 0 : codes.front().size()), K_(K) {
  check_ids(codes, ids);
  require(K >= 2, ErrorKind::InvalidArgument, "HashTable: K must be >= 2");
  std::unordered_set<Id> seen;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    require(codes[i].size() == L_, ErrorKind::DimensionMismatch, "HashTable: code lengths differ");
    require(seen.insert(ids[i]).second, ErrorKind::InvalidArgument, "HashTable: duplicate id");
    auto [it, inserted] = buckets_.try_emplace(pack_code(codes[i], K));
    if (inserted) it->second.code = codes[i];
    it->second.ids.push_back(ids[i]);
  }
  size_ = codes.size();
}

double HashTable::ball_volume(std::size_t R) const {
  double total = 0.0;
  double choose = 1.0;  // C(L, r)
  double power = 1.0;   // (K - 1)^r
  for (std::size_t r = 0; r <= std::min(R, L_); ++r) {
    if (r > 0) {
      choose = choose * static_cast<double>(L_ - r + 1) / static_cast<double>(r);
      power *= static_cast<double>(K_ - 1);
    }
    total += choose * power;
  }
  return total;
}

std::vector<Id> HashTable::lookup(const CodeWord& query, std::size_t R) const {
  if (ball_volume(R) < static_cast<double>(buckets_.size())) return lookup_by_expansion(query, R);
  return lookup_by_scan(query, R);
}

std::vector<Id> HashTable::lookup_by_scan(const CodeWord& query, std::size_t R) const {
  require(query.size() == L_, ErrorKind::DimensionMismatch, "lookup: query length differs");
  std::vector<Id> out;
  for (const auto& [key, bucket] : buckets_) {
    if (symbol_hamming(bucket.code, query) <= R) {
      out.insert(out.end(), bucket.ids.begin(), bucket.ids.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Id> HashTable::lookup_by_expansion(const CodeWord& query, std::size_t R) const {
  require(query.size() == L_, ErrorKind::DimensionMismatch, "lookup: query length differs");
  for (Symbol s : query.symbols) {
    require(s < K_, ErrorKind::InvalidArgument, "lookup: query symbol out of range");
  }
  std::vector<Id> out;
  CodeWord probe = query;
  auto visit = [&]() {
    auto it = buckets_.find(pack_code(probe, K_));
    if (it != buckets_.end()) out.insert(out.end(), it->second.ids.begin(), it->second.ids.end());
  };
  // Changes `budget` more positions, all at index >= start.
  auto expand = [&](auto&& self, std::size_t start, std::size_t budget) -> void {
    visit();
    if (budget == 0) return;
    for (std::size_t pos = start; pos < L_; ++pos) {
      const Symbol original = probe.symbols[pos];
      for (std::size_t s = 0; s < K_; ++s) {
        if (s == original) continue;
        probe.symbols[pos] = static_cast<Symbol>(s);
        self(self, pos + 1, budget - 1);
      }
      probe.symbols[pos] = original;
    }
  };
  expand(expand, 0, std::min(R, L_));
  std::sort(out.begin(), out.end());
  return out;
}

HashTable build_table(std::span<const CodeWord> codes, std::span<const Id> ids, std::size_t K) {
  return HashTable(codes, ids, K);
}

namespace {

template <typename Score, typename Better>
std::vector<Id> top_k(std::span<const CodeWord> codes, std::span<const Id> ids, std::size_t k,
                      Score score, Better better) {
  check_ids(codes, ids);
  require(k <= codes.size(), ErrorKind::InvalidArgument,
          "knn: k = " + std::to_string(k) + " exceeds database size " +
              std::to_string(codes.size()));
  using Entry = std::pair<decltype(score(codes[0])), Id>;
  std::vector<Entry> entries;
  entries.reserve(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) entries.emplace_back(score(codes[i]), ids[i]);
  auto cmp = [&](const Entry& a, const Entry& b) {
    if (a.first != b.first) return better(a.first, b.first);
    return a.second < b.second;
  };
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k),
                    entries.end(), cmp);
  std::vector<Id> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(entries[i].second);
  return out;
}

}  // namespace

std::vector<Id> knn_hamming(std::span<const CodeWord> codes, std::span<const Id> ids,
                            const CodeWord& query, std::size_t k) {
  return top_k(
      codes, ids, k, [&](const CodeWord& c) { return symbol_hamming(c, query); },
      std::less<>());
}

std::vector<Id> knn_weighted(std::span<const CodeWord> codes, std::span<const Id> ids,
                             const CodeWord& query, std::span<const double> theta, std::size_t k) {
  return top_k(
      codes, ids, k, [&](const CodeWord& c) { return weighted_similarity(c, query, theta); },
      std::greater<>());
}

std::optional<double> precision(std::span<const Id> retrieved, std::span<const Id> relevant) {
  if (retrieved.empty()) return std::nullopt;
  return static_cast<double>(count_hits(retrieved, relevant)) /
         static_cast<double>(retrieved.size());
}

std::optional<double> recall(std::span<const Id> retrieved, std::span<const Id> relevant) {
  if (relevant.empty()) return std::nullopt;
  return static_cast<double>(count_hits(retrieved, relevant)) / static_cast<double>(relevant.size());
}

RetrievalResult lookup_query(const HashTable& table, Id query_id, const CodeWord& query,
                             std::span<const Id> relevant, std::size_t R) {
  RetrievalResult r;
  r.query = query_id;
  r.retrieved = table.lookup(query, R);
  r.relevant_count = relevant.size();
  r.precision = precision(r.retrieved, relevant);
  r.recall = recall(r.retrieved, relevant);
  return r;
}

namespace {

// Per-query retrieved/relevant counts at every radius 0..L.
struct QueryProfile {
  std::vector<std::size_t> retrieved;
  std::vector<std::size_t> hits;
  std::size_t relevant = 0;
};

std::vector<QueryProfile> radius_profiles(std::span<const CodeWord> db_codes,
                                          std::span<const Id> db_ids,
                                          std::span<const CodeWord> query_codes,
                                          const GroundTruth& gt,
                                          const std::vector<std::uint32_t>& distances) {
  const std::size_t L = db_codes.empty() ? 0 : db_codes.front().size();
  const std::size_t n = db_codes.size();
  std::unordered_map<Id, std::size_t> row_of;
  for (std::size_t b = 0; b < n; ++b) row_of.emplace(db_ids[b], b);

  std::vector<QueryProfile> profiles(query_codes.size());
  const auto q_count = static_cast<std::ptrdiff_t>(query_codes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t qi = 0; qi < q_count; ++qi) {
    const auto q = static_cast<std::size_t>(qi);
    auto& p = profiles[q];
    p.retrieved.assign(L + 1, 0);
    p.hits.assign(L + 1, 0);
    p.relevant = gt.neighbor_lists[q].size();
    const std::uint32_t* dist = distances.data() + q * n;
    for (std::size_t b = 0; b < n; ++b) ++p.retrieved[dist[b]];
    for (Id id : gt.neighbor_lists[q]) ++p.hits[dist[row_of.at(id)]];
    for (std::size_t r = 1; r <= L; ++r) {
      p.retrieved[r] += p.retrieved[r - 1];
      p.hits[r] += p.hits[r - 1];
    }
  }
  return profiles;
}

void check_groundtruth(std::span<const CodeWord> db_codes, std::span<const Id> db_ids,
                       std::span<const CodeWord> query_codes, const GroundTruth& gt) {
  check_ids(db_codes, db_ids);
  require(!db_codes.empty(), ErrorKind::InvalidArgument, "evaluation: empty database");
  require(gt.neighbor_lists.size() == query_codes.size(), ErrorKind::DimensionMismatch,
          "evaluation: one groundtruth list per query required");
  std::unordered_set<Id> known(db_ids.begin(), db_ids.end());
  for (const auto& list : gt.neighbor_lists) {
    for (Id id : list) {
      require(known.count(id) == 1, ErrorKind::InvalidArgument,
              "evaluation: groundtruth id " + std::to_string(id) + " not in database");
    }
  }
}

std::vector<PrPoint> curve_from_profiles(const std::vector<QueryProfile>& profiles, std::size_t L) {
  std::vector<PrPoint> curve(L + 1);
  std::size_t evaluated = 0;
  for (const auto& p : profiles) evaluated += p.relevant > 0;
  for (std::size_t r = 0; r <= L; ++r) {
    double precision_sum = 0.0;
    double recall_sum = 0.0;
    std::size_t answered = 0;
    for (const auto& p : profiles) {
      if (p.relevant == 0) continue;
      recall_sum += static_cast<double>(p.hits[r]) / static_cast<double>(p.relevant);
      if (p.retrieved[r] > 0) {
        precision_sum += static_cast<double>(p.hits[r]) / static_cast<double>(p.retrieved[r]);
        ++answered;
      }
    }
    curve[r].radius = r;
    curve[r].answered = answered;
    if (answered > 0) curve[r].precision = precision_sum / static_cast<double>(answered);
    curve[r].recall = evaluated > 0 ? recall_sum / static_cast<double>(evaluated) : 0.0;
  }
  return curve;
}

}  // namespace

std::vector<PrPoint> pr_curve_by_radius(std::span<const CodeWord> db_codes,
                                        std::span<const Id> db_ids,
                                        std::span<const CodeWord> query_codes,
                                        const GroundTruth& gt) {
  check_groundtruth(db_codes, db_ids, query_codes, gt);
  const auto distances = kernels::omp::symbol_distances(query_codes, db_codes);
  const auto profiles = radius_profiles(db_codes, db_ids, query_codes, gt, distances);
  return curve_from_profiles(profiles, db_codes.front().size());
}

double average_precision(std::span<const PrPoint> curve) {
  double ap = 0.0;
  double previous_recall = 0.0;
  for (const auto& point : curve) {
    if (point.precision) ap += (point.recall - previous_recall) * *point.precision;
    previous_recall = point.recall;
  }
  return ap;
}

RetrievalMetrics evaluate_retrieval(std::span<const CodeWord> db_codes, std::span<const Id> db_ids,
                                    std::span<const CodeWord> query_codes, const GroundTruth& gt,
                                    std::span<const std::size_t> radii,
                                    std::span<const std::size_t> ks,
                                    std::optional<std::span<const double>> theta) {
  check_groundtruth(db_codes, db_ids, query_codes, gt);
  const std::size_t L = db_codes.front().size();
  for (std::size_t k : ks) {
    require(k <= db_codes.size(), ErrorKind::InvalidArgument,
            "evaluation: k = " + std::to_string(k) + " exceeds database size");
  }
  require(!theta || theta->size() == L, ErrorKind::DimensionMismatch,
          "evaluation: one theta weight per position required");
  for (const auto& c : query_codes) {
    require(c.size() == L, ErrorKind::DimensionMismatch, "evaluation: query code length differs");
  }
  const auto distances = kernels::omp::symbol_distances(query_codes, db_codes);
  const auto profiles = radius_profiles(db_codes, db_ids, query_codes, gt, distances);

  RetrievalMetrics m;
  m.curve = curve_from_profiles(profiles, L);
  m.average_precision = average_precision(m.curve);
  for (const auto& p : profiles) m.evaluated_queries += p.relevant > 0;
  for (std::size_t R : radii) {
    const auto& point = m.curve[std::min(R, L)];
    m.precision_at_radius[R] = point.precision.value_or(0.0);
  }

  // kNN precision per query, then averaged in query order.
  const auto q_count = static_cast<std::ptrdiff_t>(query_codes.size());
  std::vector<std::vector<double>> per_query(ks.size(), std::vector<double>(query_codes.size()));
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t qi = 0; qi < q_count; ++qi) {
    const auto q = static_cast<std::size_t>(qi);
    if (gt.neighbor_lists[q].empty()) continue;
    for (std::size_t a = 0; a < ks.size(); ++a) {
      const auto top = theta ? knn_weighted(db_codes, db_ids, query_codes[q], *theta, ks[a])
                             : knn_hamming(db_codes, db_ids, query_codes[q], ks[a]);
      per_query[a][q] = precision(top, gt.neighbor_lists[q]).value_or(0.0);
    }
  }
  for (std::size_t a = 0; a < ks.size(); ++a) {
    double sum = 0.0;
    for (std::size_t q = 0; q < query_codes.size(); ++q) {
      if (!gt.neighbor_lists[q].empty()) sum += per_query[a][q];
    }
    m.precision_at_k[ks[a]] =
        m.evaluated_queries > 0 ? sum / static_cast<double>(m.evaluated_queries) : 0.0;
  }
  return m;
}

MeanStd aggregate_runs(std::span<const double> values) {
  require(!values.empty(), ErrorKind::InvalidArgument, "aggregate_runs: need at least one value");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace rsh
