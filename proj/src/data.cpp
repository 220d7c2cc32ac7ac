#include "rsh/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "binary_io.hpp"
#include "rsh/kernels.hpp"

namespace rsh {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Splits on commas; returns false at the first non-numeric field and reports
// its 1-based column.
bool parse_row(std::string_view line, std::vector<double>& row, std::size_t& bad_column) {
  row.clear();
  std::size_t column = 1;
  for (;;) {
    const auto comma = line.find(',');
    double v = 0.0;
    if (!parse_number(line.substr(0, comma), v)) {
      bad_column = column;
      return false;
    }
    row.push_back(v);
    if (comma == std::string_view::npos) return true;
    line.remove_prefix(comma + 1);
    ++column;
  }
}

}  // namespace

Dataset parse_csv(std::string_view text) {
  std::vector<double> values;
  std::vector<double> row;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    std::size_t bad_column = 0;
    const bool ok = parse_row(line, row, bad_column);
    if (first_content_line) {
      first_content_line = false;
      if (!ok) continue;  // header
    }
    if (!ok) {
      fail(ErrorKind::Parse, "csv line " + std::to_string(line_no) + ": field " +
                                 std::to_string(bad_column) + " is not numeric");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      fail(ErrorKind::Parse, "csv line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(width) + " fields, found " +
                                 std::to_string(row.size()));
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        fail(ErrorKind::Parse, "csv line " + std::to_string(line_no) + ": non-finite value");
      }
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  require(rows > 0, ErrorKind::Parse, "csv: no data rows");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  std::copy(values.begin(), values.end(), m.data());
  return Dataset(std::move(m));
}

Dataset load_csv(const std::string& path) { return parse_csv(detail::read_file(path)); }

Dataset parse_fvec(std::string_view bytes) {
  detail::ByteReader r(bytes, "RSHV1");
  if (r.bytes(kVectorMagic.size()) != kVectorMagic) r.error("bad magic");
  const auto n = r.u64();
  const auto d = r.u64();
  if (n == 0 || d == 0) r.error("N and d must be positive");
  if (r.remaining() / 4 / d < n) {
    r.error("truncated input (header declares " + std::to_string(n) + "x" + std::to_string(d) +
            " floats)");
  }
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const float v = r.f32();
    if (!std::isfinite(v)) r.error("non-finite value");
    m.data()[i] = static_cast<double>(v);
  }
  if (r.remaining() != 0) r.error("trailing bytes");
  return Dataset(std::move(m));
}

std::string encode_fvec(const Dataset& data) {
  detail::ByteWriter w;
  w.bytes(kVectorMagic);
  w.u64(data.size());
  w.u64(data.dim());
  const Matrix& m = data.features();
  for (Eigen::Index i = 0; i < m.size(); ++i) w.f32(static_cast<float>(m.data()[i]));
  return w.take();
}

Dataset load_fvec(const std::string& path) { return parse_fvec(detail::read_file(path)); }

void save_fvec(const Dataset& data, const std::string& path) {
  detail::write_file(path, encode_fvec(data));
}

Dataset load_dataset(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.starts_with(kVectorMagic)) return parse_fvec(bytes);
  return parse_csv(bytes);
}

Vector column_mean(const Dataset& data) {
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(data.dim()));
  const Matrix& m = data.features();
  for (Eigen::Index i = 0; i < m.rows(); ++i) mean += m.row(i).transpose();
  return mean / static_cast<double>(m.rows());
}

Dataset normalize_rows(const Dataset& data) {
  Matrix m = data.features();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
  return Dataset(std::move(m), data.ids());
}

Dataset apply_center_and_normalize(const Dataset& data, const Vector& mean) {
  require(static_cast<std::size_t>(mean.size()) == data.dim(), ErrorKind::DimensionMismatch,
          "center: mean dimension differs from data");
  Matrix m = data.features().rowwise() - mean.transpose();
  return normalize_rows(Dataset(std::move(m), data.ids()));
}

std::pair<Dataset, Vector> center_and_normalize(const Dataset& data) {
  Vector mean = column_mean(data);
  return {apply_center_and_normalize(data, mean), std::move(mean)};
}

PcaBasis fit_pca(const Dataset& data, std::size_t m) {
  require(m >= 1 && m <= std::min(data.size(), data.dim()), ErrorKind::InvalidArgument,
          "fit_pca: need 1 <= m <= min(N, d) = " +
              std::to_string(std::min(data.size(), data.dim())) + ", got " + std::to_string(m));
  PcaBasis basis;
  basis.mean = column_mean(data);
  const Matrix cov = kernels::omp::covariance(data.features(), basis.mean);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  require(solver.info() == Eigen::Success, ErrorKind::InvalidArgument,
          "fit_pca: eigendecomposition failed");
  const auto d = static_cast<Eigen::Index>(data.dim());
  basis.components.resize(static_cast<Eigen::Index>(m), d);
  basis.eigenvalues.resize(static_cast<Eigen::Index>(m));
  // Eigen sorts ascending; take from the back.
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(m); ++r) {
    const Eigen::Index src = d - 1 - r;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0.0) v = -v;
    basis.components.row(r) = v.transpose();
    basis.eigenvalues(r) = solver.eigenvalues()(src);
  }
  return basis;
}

Dataset apply_pca(const PcaBasis& basis, const Dataset& data) {
  require(static_cast<std::size_t>(basis.components.cols()) == data.dim(),
          ErrorKind::DimensionMismatch, "apply_pca: basis dimension differs from data");
  Matrix centered = data.features().rowwise() - basis.mean.transpose();
  Matrix out = centered * basis.components.transpose();
  return Dataset(std::move(out), data.ids());
}

Preprocessor Preprocessor::fit(const Dataset& train, bool center, std::size_t pca_dims,
                               bool normalize) {
  Preprocessor p;
  p.mean = center ? column_mean(train) : Vector::Zero(static_cast<Eigen::Index>(train.dim()));
  p.normalize = normalize;
  if (pca_dims > 0) {
    Matrix centered = train.features().rowwise() - p.mean.transpose();
    p.pca = fit_pca(Dataset(std::move(centered), train.ids()), pca_dims);
  }
  return p;
}

Dataset Preprocessor::apply(const Dataset& data) const {
  require(static_cast<std::size_t>(mean.size()) == data.dim(), ErrorKind::DimensionMismatch,
          "preprocess: input dimension differs from the fitted transform");
  Dataset out(data.features().rowwise() - mean.transpose(), data.ids());
  if (pca) out = apply_pca(*pca, out);
  if (normalize) out = normalize_rows(out);
  return out;
}

double GroundTruth::mean_count() const {
  if (neighbor_lists.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& l : neighbor_lists) total += l.size();
  return static_cast<double>(total) / static_cast<double>(neighbor_lists.size());
}

namespace {

GroundTruth threshold_lists(const Dataset& db, const Matrix& d2, double threshold2) {
  GroundTruth gt;
  gt.threshold = std::sqrt(threshold2);
  gt.neighbor_lists.resize(static_cast<std::size_t>(d2.rows()));
  for (Eigen::Index q = 0; q < d2.rows(); ++q) {
    auto& list = gt.neighbor_lists[static_cast<std::size_t>(q)];
    for (Eigen::Index b = 0; b < d2.cols(); ++b) {
      if (d2(q, b) <= threshold2) list.push_back(db.id(static_cast<std::size_t>(b)));
    }
  }
  return gt;
}

}  // namespace

GroundTruth groundtruth_at_threshold(const Dataset& db, const Dataset& queries, double threshold) {
  require(threshold >= 0.0, ErrorKind::InvalidArgument, "groundtruth: threshold must be >= 0");
  const Matrix d2 = kernels::omp::squared_distances(queries.features(), db.features());
  return threshold_lists(db, d2, threshold * threshold);
}

GroundTruth calibrate_groundtruth(const Dataset& db, const Dataset& queries, double target_avg) {
  require(target_avg >= 1.0, ErrorKind::InvalidArgument,
          "calibrate_groundtruth: target_avg must be >= 1");
  const Matrix d2 = kernels::omp::squared_distances(queries.features(), db.features());
  const auto pool = static_cast<std::size_t>(d2.size());
  const auto rank = static_cast<std::size_t>(
      std::llround(target_avg * static_cast<double>(queries.size())));
  require(rank <= pool, ErrorKind::InvalidArgument,
          "calibrate_groundtruth: target_avg * Q = " + std::to_string(rank) +
              " exceeds the " + std::to_string(pool) + " available distances");
  std::vector<double> pooled(d2.data(), d2.data() + pool);
  std::nth_element(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   pooled.end());
  return threshold_lists(db, d2, pooled[rank - 1]);
}

GroundTruth groundtruth_by_label(const Dataset& db, std::span<const int> db_labels,
                                 std::span<const int> query_labels) {
  require(db_labels.size() == db.size(), ErrorKind::DimensionMismatch,
          "groundtruth_by_label: one label per database row required");
  GroundTruth gt;
  gt.neighbor_lists.resize(query_labels.size());
  for (std::size_t q = 0; q < query_labels.size(); ++q) {
    for (std::size_t b = 0; b < db.size(); ++b) {
      if (db_labels[b] == query_labels[q]) gt.neighbor_lists[q].push_back(db.id(b));
    }
  }
  return gt;
}

namespace {

using Similar = std::function<bool(std::size_t, std::size_t)>;

// Candidate pools up to this size are enumerated; beyond it, pairs are drawn
// by rejection sampling.
constexpr std::size_t kEnumerateLimit = 4'000'000;

void partial_shuffle(std::vector<std::uint64_t>& v, std::size_t take, Rng& rng) {
  for (std::size_t k = 0; k < take; ++k) {
    std::swap(v[k], v[k + rng.uniform_index(v.size() - k)]);
  }
  v.resize(take);
}

std::pair<std::size_t, std::size_t> quotas(std::size_t max_pairs, double pos_fraction,
                                           std::size_t have_pos, std::size_t have_neg) {
  const auto want_pos = static_cast<std::size_t>(
      std::llround(static_cast<double>(max_pairs) * pos_fraction));
  std::size_t n_pos = std::min(want_pos, have_pos);
  const std::size_t n_neg = std::min(max_pairs - n_pos, have_neg);
  n_pos = std::min(have_pos, max_pairs - n_neg);
  return {n_pos, n_neg};
}

PairSet sample_pairs(std::size_t n, const Similar& similar, std::size_t max_pairs,
                     double pos_fraction, Rng& rng) {
  require(n >= 2, ErrorKind::InvalidArgument, "make_pairs: need at least 2 rows");
  require(max_pairs >= 1, ErrorKind::InvalidArgument, "make_pairs: max_pairs must be >= 1");
  require(pos_fraction > 0.0 && pos_fraction < 1.0, ErrorKind::InvalidArgument,
          "make_pairs: pos_fraction must lie in (0, 1)");
  auto key = [n](std::size_t i, std::size_t j) { return static_cast<std::uint64_t>(i) * n + j; };
  const std::size_t candidates = n * (n - 1) / 2;

  std::vector<std::uint64_t> pos;
  std::vector<std::uint64_t> neg;
  if (candidates <= kEnumerateLimit) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) (similar(i, j) ? pos : neg).push_back(key(i, j));
    }
    if (candidates > max_pairs) {
      const auto [n_pos, n_neg] = quotas(max_pairs, pos_fraction, pos.size(), neg.size());
      partial_shuffle(pos, n_pos, rng);
      partial_shuffle(neg, n_neg, rng);
    }
  } else {
    const auto [want_pos, want_neg] = quotas(max_pairs, pos_fraction, max_pairs, max_pairs);
    std::unordered_set<std::uint64_t> seen;
    const std::size_t attempts = 50 * max_pairs;
    std::vector<std::uint64_t> spare_pos;
    std::vector<std::uint64_t> spare_neg;
    for (std::size_t t = 0; t < attempts && (pos.size() < want_pos || neg.size() < want_neg); ++t) {
      std::size_t i = rng.uniform_index(n);
      std::size_t j = rng.uniform_index(n);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      if (!seen.insert(key(i, j)).second) continue;
      if (similar(i, j)) {
        (pos.size() < want_pos ? pos : spare_pos).push_back(key(i, j));
      } else {
        (neg.size() < want_neg ? neg : spare_neg).push_back(key(i, j));
      }
    }
    // Top up from the surplus of the other class.
    for (auto* spare : {&spare_pos, &spare_neg}) {
      for (auto k : *spare) {
        if (pos.size() + neg.size() >= max_pairs) break;
        (spare == &spare_pos ? pos : neg).push_back(k);
      }
    }
  }

  std::vector<Pair> pairs;
  pairs.reserve(pos.size() + neg.size());
  for (auto k : pos) pairs.push_back({static_cast<std::size_t>(k / n), static_cast<std::size_t>(k % n), 1});
  for (auto k : neg) pairs.push_back({static_cast<std::size_t>(k / n), static_cast<std::size_t>(k % n), 0});
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  return PairSet(std::move(pairs), n);
}

}  // namespace

PairSet make_pairs(const Dataset& db, double threshold, std::size_t max_pairs, double pos_fraction,
                   Rng& rng) {
  require(!std::isnan(threshold), ErrorKind::InvalidArgument, "make_pairs: threshold is NaN");
  const Matrix& X = db.features();
  const double t2 = std::isinf(threshold) ? threshold : threshold * threshold;
  auto similar = [&](std::size_t i, std::size_t j) {
    return (X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).squaredNorm() <= t2;
  };
  return sample_pairs(db.size(), similar, max_pairs, pos_fraction, rng);
}

PairSet make_pairs_by_label(std::span<const int> labels, std::size_t max_pairs,
                            double pos_fraction, Rng& rng) {
  auto similar = [&](std::size_t i, std::size_t j) { return labels[i] == labels[j]; };
  return sample_pairs(labels.size(), similar, max_pairs, pos_fraction, rng);
}

SyntheticClusters synth_clusters(std::size_t n_clusters, std::size_t per_cluster, std::size_t d,
                                 double separation, double noise_sigma, Rng& rng) {
  require(n_clusters >= 1 && per_cluster >= 1 && d >= 1, ErrorKind::InvalidArgument,
          "synth_clusters: counts and dimension must be positive");
  require(separation >= 0.0 && noise_sigma >= 0.0, ErrorKind::InvalidArgument,
          "synth_clusters: separation and noise must be >= 0");
  const auto K = static_cast<Eigen::Index>(n_clusters);
  const auto D = static_cast<Eigen::Index>(d);
  Matrix centers(K, D);
  if (K <= D) {
    // Scaled orthonormal directions: every pair of centers is exactly
    // `separation` apart.
    Matrix g(D, K);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
                              Eigen::MatrixXd::Identity(D, K);
    centers = (separation / std::sqrt(2.0)) * q.transpose();
  } else {
    // More clusters than dimensions: rejection sampling at a scale where
    // typical pairwise distances are about `separation`.
    double spread = std::max(separation / std::sqrt(2.0 * static_cast<double>(d)), 1e-3);
    for (Eigen::Index c = 0; c < K; ++c) {
      for (int attempt = 0;; ++attempt) {
        for (Eigen::Index k = 0; k < D; ++k) centers(c, k) = spread * rng.normal();
        bool ok = true;
        for (Eigen::Index o = 0; o < c && ok; ++o) {
          ok = (centers.row(c) - centers.row(o)).norm() >= separation;
        }
        if (ok) break;
        if (attempt % 100 == 99) spread *= 1.5;
      }
    }
  }
  Matrix points(K * static_cast<Eigen::Index>(per_cluster), D);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(points.rows()));
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < K; ++c) {
    for (std::size_t p = 0; p < per_cluster; ++p, ++r) {
      for (Eigen::Index k = 0; k < D; ++k) points(r, k) = centers(c, k) + noise_sigma * rng.normal();
      labels.push_back(static_cast<int>(c));
    }
  }
  return {Dataset(std::move(points)), std::move(labels), std::move(centers)};
}

Split random_split(std::size_t n, std::size_t train_count, std::size_t query_count, Rng& rng) {
  require(train_count >= 1 && query_count >= 1, ErrorKind::InvalidArgument,
          "random_split: train and query counts must be positive");
  require(train_count + query_count <= n, ErrorKind::InvalidArgument,
          "random_split: train + query = " + std::to_string(train_count + query_count) +
              " exceeds dataset size " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < train_count + query_count; ++k) {
    std::swap(order[k], order[k + rng.uniform_index(n - k)]);
  }
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
  s.query.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count),
                 order.begin() + static_cast<std::ptrdiff_t>(train_count + query_count));
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.query.begin(), s.query.end());
  return s;
}

}  // namespace rsh
