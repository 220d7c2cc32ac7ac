#include "rsh/hashers.hpp"

#include <string>

#include "rsh/kernels.hpp"

namespace rsh {

namespace {

void check_dim(std::size_t got, std::size_t want, const char* where) {
  require(got == want, ErrorKind::DimensionMismatch,
          std::string(where) + ": vector has dimension " + std::to_string(got) + ", expected " +
              std::to_string(want));
}

}  // namespace

std::size_t first_argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

void project(const ProjectionMatrix& W, std::span<const double> x, std::span<double> out) {
  project(W.rows(), x, out);
}

void project(const Matrix& m, std::span<const double> x, std::span<double> out) {
  const auto d = static_cast<std::size_t>(m.cols());
  check_dim(x.size(), d, "project");
  for (std::size_t k = 0; k < static_cast<std::size_t>(m.rows()); ++k) {
    const double* w = m.data() + k * d;
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) acc += w[c] * x[c];
    out[k] = acc;
  }
}

Symbol rsh_encode(std::span<const double> x, const ProjectionMatrix& W) {
  std::vector<double> y(W.subspaces());
  project(W, x, y);
  return static_cast<Symbol>(first_argmax(y));
}

CodeWord rsh_encode(std::span<const double> x, const HashModel& model) {
  check_dim(x.size(), model.dim(), "rsh_encode");
  CodeWord code;
  code.symbols.reserve(model.length());
  for (const auto& W : model.projections()) code.symbols.push_back(rsh_encode(x, W));
  return code;
}

std::vector<CodeWord> encode_dataset(const Dataset& data, const HashModel& model) {
  check_dim(data.dim(), model.dim(), "encode_dataset");
  return kernels::omp::encode_rsh(data.features(), model.projections());
}

WtaSpec::WtaSpec(std::vector<std::vector<std::size_t>> permutations, std::size_t window)
    : permutations_(std::move(permutations)), window_(window) {
  require(!permutations_.empty(), ErrorKind::InvalidArgument, "WtaSpec: need L >= 1");
  const std::size_t d = permutations_.front().size();
  require(window_ >= 2 && window_ <= d, ErrorKind::InvalidArgument,
          "WtaSpec: window must satisfy 2 <= K <= d");
  std::vector<char> seen(d);
  for (const auto& perm : permutations_) {
    require(perm.size() == d, ErrorKind::DimensionMismatch, "WtaSpec: permutation sizes differ");
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t v : perm) {
      require(v < d && !seen[v], ErrorKind::InvalidArgument,
              "WtaSpec: permutation is not a bijection on [0, d)");
      seen[v] = 1;
    }
  }
}

WtaSpec make_wta_spec(std::size_t L, std::size_t window, std::size_t d, Rng& rng) {
  std::vector<std::vector<std::size_t>> perms(L, std::vector<std::size_t>(d));
  for (auto& perm : perms) {
    for (std::size_t i = 0; i < d; ++i) perm[i] = i;
    // Fisher-Yates with the portable index draw.
    for (std::size_t i = d; i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    }
  }
  return WtaSpec(std::move(perms), window);
}

CodeWord wta_encode(std::span<const double> x, const WtaSpec& spec) {
  check_dim(x.size(), spec.dim(), "wta_encode");
  CodeWord code;
  code.symbols.reserve(spec.length());
  for (const auto& perm : spec.permutations()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.window(); ++k) {
      if (x[perm[k]] > x[perm[best]]) best = k;
    }
    code.symbols.push_back(static_cast<Symbol>(best));
  }
  return code;
}

std::vector<CodeWord> wta_encode_dataset(const Dataset& data, const WtaSpec& spec) {
  check_dim(data.dim(), spec.dim(), "wta_encode_dataset");
  return kernels::omp::encode_wta(data.features(), spec);
}

HashModel wta_as_rsh(const WtaSpec& spec) {
  const auto K = spec.window();
  const auto d = spec.dim();
  std::vector<ProjectionMatrix> projections;
  projections.reserve(spec.length());
  for (const auto& perm : spec.permutations()) {
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < K; ++k) {
      w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(perm[k])) = 1.0;
    }
    projections.emplace_back(std::move(w));
  }
  Hyperparams h;
  h.K = K;
  h.L = spec.length();
  return HashModel(std::move(projections), std::nullopt, h);
}

LshSpec::LshSpec(Matrix hyperplanes) : hyperplanes_(std::move(hyperplanes)) {
  require(hyperplanes_.rows() >= 1 && hyperplanes_.cols() >= 1, ErrorKind::InvalidArgument,
          "LshSpec: need B >= 1 and d >= 1");
  require(hyperplanes_.allFinite(), ErrorKind::InvalidArgument, "LshSpec: non-finite entry");
}

LshSpec make_lsh_spec(std::size_t bits, std::size_t d, Rng& rng) {
  require(bits >= 1 && d >= 1, ErrorKind::InvalidArgument, "make_lsh_spec: need B >= 1, d >= 1");
  Matrix h(static_cast<Eigen::Index>(bits), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = rng.normal();
  return LshSpec(std::move(h));
}

CodeWord lsh_encode(std::span<const double> x, const LshSpec& spec) {
  check_dim(x.size(), spec.dim(), "lsh_encode");
  const Matrix& h = spec.hyperplanes();
  const auto d = spec.dim();
  CodeWord code;
  code.symbols.resize(spec.bits());
  for (std::size_t b = 0; b < spec.bits(); ++b) {
    const double* w = h.data() + b * d;
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) acc += w[c] * x[c];
    code.symbols[b] = acc >= 0.0 ? 1 : 0;
  }
  return code;
}

std::vector<CodeWord> lsh_encode_dataset(const Dataset& data, const LshSpec& spec) {
  check_dim(data.dim(), spec.dim(), "lsh_encode_dataset");
  return kernels::omp::encode_lsh(data.features(), spec);
}

std::size_t bits_per_symbol(std::size_t K) {
  require(K >= 2, ErrorKind::InvalidArgument, "bits_per_symbol: K must be >= 2");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < K) ++bits;
  return bits;
}

PackedCode pack_code(const CodeWord& code, std::size_t K) {
  const std::size_t width = bits_per_symbol(K);
  PackedCode out;
  out.bit_count = code.size() * width;
  out.bytes.assign((out.bit_count + 7) / 8, 0);
  std::size_t pos = 0;
  for (Symbol s : code.symbols) {
    require(s < K, ErrorKind::InvalidArgument,
            "pack_code: symbol " + std::to_string(s) + " is not < K = " + std::to_string(K));
    for (std::size_t b = width; b-- > 0; ++pos) {
      if ((s >> b) & 1u) out.bytes[pos / 8] |= static_cast<std::uint8_t>(0x80u >> (pos % 8));
    }
  }
  return out;
}

CodeWord unpack_code(const PackedCode& packed, std::size_t L, std::size_t K) {
  const std::size_t width = bits_per_symbol(K);
  require(packed.bit_count == L * width && packed.bytes.size() == (packed.bit_count + 7) / 8,
          ErrorKind::InvalidArgument, "unpack_code: bit count does not match L and K");
  CodeWord code;
  code.symbols.resize(L);
  std::size_t pos = 0;
  for (auto& s : code.symbols) {
    unsigned v = 0;
    for (std::size_t b = 0; b < width; ++b, ++pos) v = (v << 1) | (packed.bit(pos) ? 1u : 0u);
    require(v < K, ErrorKind::InvalidArgument, "unpack_code: decoded symbol is not < K");
    s = static_cast<Symbol>(v);
  }
  return code;
}

}  // namespace rsh
