#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rsh/error.hpp"
#include "rsh/random.hpp"

namespace rsh {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Id = std::int64_t;
using Symbol = std::uint16_t;

/// Dense N x d feature matrix whose rows carry stable integer ids.
class Dataset {
 public:
  /// Rows get ids 0..N-1.
  explicit Dataset(Matrix features);
  Dataset(Matrix features, std::vector<Id> ids);

  std::size_t size() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }

  const Matrix& features() const { return features_; }
  const std::vector<Id>& ids() const { return ids_; }
  Id id(std::size_t row) const { return ids_[row]; }

  auto row(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)); }

  /// New dataset made of the given rows (ids carried over).
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  Matrix features_;
  std::vector<Id> ids_;
};

struct Pair {
  std::size_t i;
  std::size_t j;
  int s;

  friend bool operator==(const Pair&, const Pair&) = default;
};

/// Pairwise similarity supervision over the rows of one dataset. Pairs are
/// canonical (i < j), unique, and labelled 0 or 1.
class PairSet {
 public:
  PairSet(std::vector<Pair> pairs, std::size_t row_count);

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const Pair& operator[](std::size_t k) const { return pairs_[k]; }
  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t positives() const;

 private:
  std::vector<Pair> pairs_;
  std::size_t row_count_;
};

/// K x d matrix; row k is the k-th subspace direction.
class ProjectionMatrix {
 public:
  explicit ProjectionMatrix(Matrix rows);

  std::size_t subspaces() const { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows_.cols()); }
  const Matrix& rows() const { return rows_; }

  friend bool operator==(const ProjectionMatrix& a, const ProjectionMatrix& b) {
    return a.rows_.rows() == b.rows_.rows() && a.rows_.cols() == b.rows_.cols() &&
           a.rows_ == b.rows_;
  }

 private:
  Matrix rows_;
};

struct Hyperparams {
  std::size_t K = 4;
  std::size_t L = 16;
  double rho = 1.0;
  double lambda = 1.0;
  double eta = 0.1;
  std::size_t epochs = 50;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  double eps_min = 1e-4;

  /// Throws Error(InvalidArgument) naming the first offending field.
  void validate() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

class HashModel {
 public:
  HashModel(std::vector<ProjectionMatrix> projections, std::optional<std::vector<double>> weights,
            Hyperparams hyper);

  std::size_t length() const { return projections_.size(); }
  std::size_t subspaces() const { return projections_.front().subspaces(); }
  std::size_t dim() const { return projections_.front().dim(); }

  const std::vector<ProjectionMatrix>& projections() const { return projections_; }
  const ProjectionMatrix& projection(std::size_t l) const { return projections_[l]; }
  const std::optional<std::vector<double>>& weights() const { return weights_; }
  const Hyperparams& hyper() const { return hyper_; }

  friend bool operator==(const HashModel&, const HashModel&) = default;

 private:
  std::vector<ProjectionMatrix> projections_;
  std::optional<std::vector<double>> weights_;
  Hyperparams hyper_;
};

/// Length-L K-nary code, one symbol per hash function.
struct CodeWord {
  std::vector<Symbol> symbols;

  std::size_t size() const { return symbols.size(); }
  Symbol operator[](std::size_t l) const { return symbols[l]; }

  friend bool operator==(const CodeWord&, const CodeWord&) = default;
  friend auto operator<=>(const CodeWord&, const CodeWord&) = default;
};

/// K x d matrix of i.i.d. standard-normal draws.
ProjectionMatrix init_projection(std::size_t K, std::size_t d, Rng& rng);

}  // namespace rsh
