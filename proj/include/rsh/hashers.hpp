#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsh/core.hpp"

namespace rsh {

/// Index of the largest value; the smallest index wins ties.
std::size_t first_argmax(std::span<const double> values);

/// Row i of a row-major matrix as a contiguous span.
inline std::span<const double> row_span(const Matrix& m, std::size_t i) {
  return {m.data() + i * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

/// y = W x, written into `out` (size K).
void project(const ProjectionMatrix& W, std::span<const double> x, std::span<double> out);
void project(const Matrix& W, std::span<const double> x, std::span<double> out);

/// Index of the subspace with the largest projection w_k . x.
Symbol rsh_encode(std::span<const double> x, const ProjectionMatrix& W);

/// One symbol per hash function of the model, for a single vector.
CodeWord rsh_encode(std::span<const double> x, const HashModel& model);

/// Codes for every row of `data`, in row order.
std::vector<CodeWord> encode_dataset(const Dataset& data, const HashModel& model);

/// Winner-take-all hash: L random permutations of [0, d) and a window K.
class WtaSpec {
 public:
  WtaSpec(std::vector<std::vector<std::size_t>> permutations, std::size_t window);

  std::size_t length() const { return permutations_.size(); }
  std::size_t window() const { return window_; }
  std::size_t dim() const { return permutations_.front().size(); }
  const std::vector<std::vector<std::size_t>>& permutations() const { return permutations_; }

 private:
  std::vector<std::vector<std::size_t>> permutations_;
  std::size_t window_;
};

WtaSpec make_wta_spec(std::size_t L, std::size_t window, std::size_t d, Rng& rng);

CodeWord wta_encode(std::span<const double> x, const WtaSpec& spec);
std::vector<CodeWord> wta_encode_dataset(const Dataset& data, const WtaSpec& spec);

/// WTA expressed as an RSH model: row k of W_l is the basis vector e_{pi_l(k)}.
HashModel wta_as_rsh(const WtaSpec& spec);

/// Sign-of-random-projection LSH with B hyperplanes.
class LshSpec {
 public:
  explicit LshSpec(Matrix hyperplanes);

  std::size_t bits() const { return static_cast<std::size_t>(hyperplanes_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(hyperplanes_.cols()); }
  const Matrix& hyperplanes() const { return hyperplanes_; }

 private:
  Matrix hyperplanes_;
};

LshSpec make_lsh_spec(std::size_t bits, std::size_t d, Rng& rng);

/// Binary code as a K = 2 CodeWord: symbol b is 1 iff hyperplane_b . x >= 0.
CodeWord lsh_encode(std::span<const double> x, const LshSpec& spec);
std::vector<CodeWord> lsh_encode_dataset(const Dataset& data, const LshSpec& spec);

/// ceil(log2 K), the bits needed for one K-nary symbol.
std::size_t bits_per_symbol(std::size_t K);

/// Packed bit string, most significant bit first.
struct PackedCode {
  std::vector<std::uint8_t> bytes;
  std::size_t bit_count = 0;

  bool bit(std::size_t b) const { return (bytes[b / 8] >> (7 - b % 8)) & 1u; }

  friend bool operator==(const PackedCode&, const PackedCode&) = default;
};

/// L * ceil(log2 K) bits, each symbol big-endian, symbols in order.
PackedCode pack_code(const CodeWord& code, std::size_t K);
CodeWord unpack_code(const PackedCode& packed, std::size_t L, std::size_t K);

}  // namespace rsh
