#include "rsh/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace rsh {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::Version: return "version_mismatch";
    case ErrorKind::Io: return "io_error";
    case ErrorKind::Config: return "config_error";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

namespace {

std::vector<Id> iota_ids(Eigen::Index n) {
  std::vector<Id> ids(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<Id>(i);
  return ids;
}

}  // namespace

Dataset::Dataset(Matrix features) : Dataset(features, iota_ids(features.rows())) {}

Dataset::Dataset(Matrix features, std::vector<Id> ids)
    : features_(std::move(features)), ids_(std::move(ids)) {
  require(features_.rows() >= 1 && features_.cols() >= 1, ErrorKind::InvalidArgument,
          "Dataset: need N >= 1 and d >= 1");
  require(ids_.size() == static_cast<std::size_t>(features_.rows()), ErrorKind::InvalidArgument,
          "Dataset: id count " + std::to_string(ids_.size()) + " does not match row count " +
              std::to_string(features_.rows()));
  require(features_.allFinite(), ErrorKind::InvalidArgument, "Dataset: non-finite feature value");
  std::unordered_set<Id> seen(ids_.begin(), ids_.end());
  require(seen.size() == ids_.size(), ErrorKind::InvalidArgument, "Dataset: duplicate ids");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Matrix m(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<Id> ids;
  ids.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    require(rows[k] < size(), ErrorKind::InvalidArgument, "Dataset::subset: row out of range");
    m.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(rows[k]));
    ids.push_back(ids_[rows[k]]);
  }
  return Dataset(std::move(m), std::move(ids));
}

PairSet::PairSet(std::vector<Pair> pairs, std::size_t row_count)
    : pairs_(std::move(pairs)), row_count_(row_count) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(pairs_.size());
  for (const Pair& p : pairs_) {
    require(p.i < p.j, ErrorKind::InvalidArgument,
            "PairSet: pair (" + std::to_string(p.i) + ", " + std::to_string(p.j) +
                ") is not canonical (need i < j)");
    require(p.j < row_count_, ErrorKind::InvalidArgument, "PairSet: row index out of range");
    require(p.s == 0 || p.s == 1, ErrorKind::InvalidArgument, "PairSet: label must be 0 or 1");
    const auto key = static_cast<std::uint64_t>(p.i) * row_count_ + p.j;
    require(seen.insert(key).second, ErrorKind::InvalidArgument, "PairSet: duplicate pair");
  }
}

std::size_t PairSet::positives() const {
  return static_cast<std::size_t>(
      std::count_if(pairs_.begin(), pairs_.end(), [](const Pair& p) { return p.s == 1; }));
}

ProjectionMatrix::ProjectionMatrix(Matrix rows) : rows_(std::move(rows)) {
  require(rows_.rows() >= 2, ErrorKind::InvalidArgument,
          "ProjectionMatrix: need K >= 2 subspaces, got " + std::to_string(rows_.rows()));
  require(rows_.cols() >= 1, ErrorKind::InvalidArgument, "ProjectionMatrix: need d >= 1");
  require(rows_.allFinite(), ErrorKind::InvalidArgument, "ProjectionMatrix: non-finite entry");
}

void Hyperparams::validate() const {
  auto check = [](bool ok, const char* field, const std::string& why) {
    require(ok, ErrorKind::InvalidArgument, std::string("hyperparameter ") + field + ": " + why);
  };
  check(K >= 2, "K", "must be >= 2");
  check(K <= 65536, "K", "must fit a 16-bit symbol");
  check(L >= 1, "L", "must be >= 1");
  check(std::isfinite(rho) && rho >= 0.0, "rho", "must be finite and >= 0");
  check(std::isfinite(lambda) && lambda >= 0.0, "lambda", "must be finite and >= 0");
  check(std::isfinite(eta) && eta > 0.0, "eta", "must be finite and > 0");
  check(epochs >= 1, "epochs", "must be >= 1");
  check(std::isfinite(tol) && tol >= 0.0, "tol", "must be finite and >= 0");
  check(eps_min > 0.0 && eps_min < 0.5, "eps_min", "must lie in (0, 0.5)");
}

HashModel::HashModel(std::vector<ProjectionMatrix> projections,
                     std::optional<std::vector<double>> weights, Hyperparams hyper)
    : projections_(std::move(projections)), weights_(std::move(weights)), hyper_(hyper) {
  require(!projections_.empty(), ErrorKind::InvalidArgument, "HashModel: need L >= 1");
  const auto K = projections_.front().subspaces();
  const auto d = projections_.front().dim();
  for (const auto& w : projections_) {
    require(w.subspaces() == K && w.dim() == d, ErrorKind::DimensionMismatch,
            "HashModel: projections must share (K, d)");
  }
  require(hyper_.K == K && hyper_.L == projections_.size(), ErrorKind::InvalidArgument,
          "HashModel: hyperparameters K/L disagree with the projections");
  if (weights_) {
    require(weights_->size() == projections_.size(), ErrorKind::InvalidArgument,
            "HashModel: weight count must equal L");
    for (double t : *weights_) {
      require(std::isfinite(t), ErrorKind::InvalidArgument, "HashModel: non-finite weight");
    }
  }
}

ProjectionMatrix init_projection(std::size_t K, std::size_t d, Rng& rng) {
  require(K >= 2, ErrorKind::InvalidArgument,
          "init_projection: K must be >= 2 (argmax over one subspace is constant)");
  require(d >= 1, ErrorKind::InvalidArgument, "init_projection: d must be >= 1");
  Matrix w(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(k, c) = rng.normal();
  }
  return ProjectionMatrix(std::move(w));
}

}  // namespace rsh
