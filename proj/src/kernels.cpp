#include "rsh/kernels.hpp"

#include <omp.h>

#include "rsh/hashers.hpp"

namespace rsh::kernels {

namespace {

using Index = std::ptrdiff_t;

Index rows_of(const Matrix& m) { return static_cast<Index>(m.rows()); }

// Each body computes one output slot from read-only inputs; `Parallel` only
// decides whether the outer loop is shared across threads.

template <bool Parallel>
std::vector<CodeWord> encode_rsh_impl(const Matrix& rows,
                                      std::span<const ProjectionMatrix> projections) {
  for (const auto& W : projections) {
    require(W.dim() == static_cast<std::size_t>(rows.cols()), ErrorKind::DimensionMismatch,
            "encode_rsh: projection dimension differs from data");
  }
  const Index n = rows_of(rows);
  std::vector<CodeWord> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (Parallel)
  for (Index i = 0; i < n; ++i) {
    const auto x = row_span(rows, static_cast<std::size_t>(i));
    auto& code = out[static_cast<std::size_t>(i)].symbols;
    code.resize(projections.size());
    std::vector<double> y(projections.empty() ? 0 : projections.front().subspaces());
    for (std::size_t l = 0; l < projections.size(); ++l) {
      project(projections[l], x, y);
      code[l] = static_cast<Symbol>(first_argmax(y));
    }
  }
  return out;
}

template <bool Parallel>
std::vector<CodeWord> encode_wta_impl(const Matrix& rows, const WtaSpec& spec) {
  const Index n = rows_of(rows);
  std::vector<CodeWord> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (Parallel)
  for (Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = wta_encode(row_span(rows, static_cast<std::size_t>(i)), spec);
  }
  return out;
}

template <bool Parallel>
std::vector<CodeWord> encode_lsh_impl(const Matrix& rows, const LshSpec& spec) {
  const Index n = rows_of(rows);
  std::vector<CodeWord> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (Parallel)
  for (Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = lsh_encode(row_span(rows, static_cast<std::size_t>(i)), spec);
  }
  return out;
}

template <bool Parallel>
Matrix squared_distances_impl(const Matrix& queries, const Matrix& database) {
  require(queries.cols() == database.cols(), ErrorKind::DimensionMismatch,
          "squared_distances: query and database dimensions differ");
  const Index q = rows_of(queries);
  const Index n = rows_of(database);
  const auto d = static_cast<std::size_t>(queries.cols());
  Matrix out(q, n);
#pragma omp parallel for schedule(static) if (Parallel)
  for (Index a = 0; a < q; ++a) {
    const double* x = queries.data() + static_cast<std::size_t>(a) * d;
    double* dst = out.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(n);
    for (Index b = 0; b < n; ++b) {
      const double* y = database.data() + static_cast<std::size_t>(b) * d;
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = x[c] - y[c];
        acc += diff * diff;
      }
      dst[b] = acc;
    }
  }
  return out;
}

template <bool Parallel>
std::vector<std::uint32_t> symbol_distances_impl(std::span<const CodeWord> queries,
                                                 std::span<const CodeWord> database) {
  const auto q = static_cast<Index>(queries.size());
  const auto n = database.size();
  std::vector<std::uint32_t> out(queries.size() * n);
  for (const auto& c : database) {
    require(queries.empty() || c.size() == queries.front().size(), ErrorKind::DimensionMismatch,
            "symbol_distances: code lengths differ");
  }
#pragma omp parallel for schedule(static) if (Parallel)
  for (Index a = 0; a < q; ++a) {
    const auto& qa = queries[static_cast<std::size_t>(a)].symbols;
    std::uint32_t* dst = out.data() + static_cast<std::size_t>(a) * n;
    for (std::size_t b = 0; b < n; ++b) {
      const auto& cb = database[b].symbols;
      std::uint32_t diff = 0;
      for (std::size_t l = 0; l < qa.size(); ++l) diff += qa[l] != cb[l];
      dst[b] = diff;
    }
  }
  return out;
}

template <bool Parallel>
Matrix covariance_impl(const Matrix& rows, const Vector& mean) {
  require(mean.size() == rows.cols(), ErrorKind::DimensionMismatch,
          "covariance: mean dimension differs from data");
  const Index n = rows_of(rows);
  const Index d = static_cast<Index>(rows.cols());
  Matrix centered = rows.rowwise() - mean.transpose();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  Matrix cov(d, d);
  // Upper triangle in parallel over rows of the output, each entry summed
  // over samples in index order.
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (Index a = 0; a < d; ++a) {
    for (Index b = a; b < d; ++b) {
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) acc += centered(i, a) * centered(i, b);
      cov(a, b) = acc / denom;
    }
  }
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < a; ++b) cov(a, b) = cov(b, a);
  }
  return cov;
}

}  // namespace

namespace serial {

std::vector<CodeWord> encode_rsh(const Matrix& rows, std::span<const ProjectionMatrix> projections) {
  return encode_rsh_impl<false>(rows, projections);
}
std::vector<CodeWord> encode_wta(const Matrix& rows, const WtaSpec& spec) {
  return encode_wta_impl<false>(rows, spec);
}
std::vector<CodeWord> encode_lsh(const Matrix& rows, const LshSpec& spec) {
  return encode_lsh_impl<false>(rows, spec);
}
Matrix squared_distances(const Matrix& queries, const Matrix& database) {
  return squared_distances_impl<false>(queries, database);
}
std::vector<std::uint32_t> symbol_distances(std::span<const CodeWord> queries,
                                            std::span<const CodeWord> database) {
  return symbol_distances_impl<false>(queries, database);
}
Matrix covariance(const Matrix& rows, const Vector& mean) {
  return covariance_impl<false>(rows, mean);
}

}  // namespace serial

namespace omp {

std::vector<CodeWord> encode_rsh(const Matrix& rows, std::span<const ProjectionMatrix> projections) {
  return encode_rsh_impl<true>(rows, projections);
}
std::vector<CodeWord> encode_wta(const Matrix& rows, const WtaSpec& spec) {
  return encode_wta_impl<true>(rows, spec);
}
std::vector<CodeWord> encode_lsh(const Matrix& rows, const LshSpec& spec) {
  return encode_lsh_impl<true>(rows, spec);
}
Matrix squared_distances(const Matrix& queries, const Matrix& database) {
  return squared_distances_impl<true>(queries, database);
}
std::vector<std::uint32_t> symbol_distances(std::span<const CodeWord> queries,
                                            std::span<const CodeWord> database) {
  return symbol_distances_impl<true>(queries, database);
}
Matrix covariance(const Matrix& rows, const Vector& mean) {
  return covariance_impl<true>(rows, mean);
}

}  // namespace omp

int max_threads() { return omp_get_max_threads(); }

}  // namespace rsh::kernels
