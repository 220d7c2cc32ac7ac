#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version with the same signature; the two perform identical
// per-element arithmetic in identical order, so their outputs are
// bit-identical for any thread count. Library code calls the omp:: versions;
// tests compare against serial::, and bench/ times both.

#include <cstdint>
#include <span>
#include <vector>

#include "rsh/core.hpp"

namespace rsh {
class WtaSpec;
class LshSpec;
}  // namespace rsh

namespace rsh::kernels {

namespace serial {

std::vector<CodeWord> encode_rsh(const Matrix& rows, std::span<const ProjectionMatrix> projections);
std::vector<CodeWord> encode_wta(const Matrix& rows, const WtaSpec& spec);
std::vector<CodeWord> encode_lsh(const Matrix& rows, const LshSpec& spec);

/// Q x N squared Euclidean distances.
Matrix squared_distances(const Matrix& queries, const Matrix& database);

/// Q x N symbol-Hamming distances, row-major.
std::vector<std::uint32_t> symbol_distances(std::span<const CodeWord> queries,
                                            std::span<const CodeWord> database);

/// Sample covariance of the rows around `mean` (divisor N - 1, or 1 when N == 1).
Matrix covariance(const Matrix& rows, const Vector& mean);

}  // namespace serial

namespace omp {

std::vector<CodeWord> encode_rsh(const Matrix& rows, std::span<const ProjectionMatrix> projections);
std::vector<CodeWord> encode_wta(const Matrix& rows, const WtaSpec& spec);
std::vector<CodeWord> encode_lsh(const Matrix& rows, const LshSpec& spec);
Matrix squared_distances(const Matrix& queries, const Matrix& database);
std::vector<std::uint32_t> symbol_distances(std::span<const CodeWord> queries,
                                            std::span<const CodeWord> database);
Matrix covariance(const Matrix& rows, const Vector& mean);

}  // namespace omp

/// Worker count the omp kernels will use.
int max_threads();

}  // namespace rsh::kernels
