#include "doctest.h"

#include <algorithm>

#include "rsh/hashers.hpp"

using namespace rsh;

namespace {

ProjectionMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return ProjectionMatrix(m);
}

}  // namespace

TEST_CASE("first_argmax prefers the smallest index") {
  const double v[] = {1.0, 3.0, 3.0, 2.0};
  CHECK(first_argmax(v) == 1);
  const double w[] = {-1.0};
  CHECK(first_argmax(w) == 0);
}

TEST_CASE("rsh_encode picks the largest projection") {
  const auto W = from_rows({{1, 0}, {0, 1}, {-1, -1}});
  const double a[] = {2.0, 1.0};
  const double b[] = {0.5, 3.0};
  const double c[] = {-2.0, -1.0};
  const double tie[] = {1.0, 1.0};
  CHECK(rsh_encode(a, W) == 0);
  CHECK(rsh_encode(b, W) == 1);
  CHECK(rsh_encode(c, W) == 2);
  CHECK(rsh_encode(tie, W) == 0);
  const double wrong[] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(rsh_encode(wrong, W), Error);
}

TEST_CASE("dataset encoding equals per-row encoding") {
  Rng rng(8);
  Hyperparams h;
  h.K = 5;
  h.L = 6;
  std::vector<ProjectionMatrix> p;
  for (int l = 0; l < 6; ++l) p.push_back(init_projection(5, 7, rng));
  const HashModel model(p, std::nullopt, h);
  Matrix x(40, 7);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const Dataset data(x);
  const auto codes = encode_dataset(data, model);
  REQUIRE(codes.size() == 40);
  for (std::size_t i = 0; i < 40; ++i) CHECK(codes[i] == rsh_encode(row_span(x, i), model));
}

TEST_CASE("wta encodes the argmax inside the permuted window") {
  // x = (3, 1, 4, 1, 5); window of the first three permuted entries.
  const WtaSpec spec({{4, 0, 2, 1, 3}, {1, 3, 0, 2, 4}, {2, 4, 0, 1, 3}}, 3);
  const double x[] = {3, 1, 4, 1, 5};
  const auto code = wta_encode(x, spec);
  // perm 0 window: x4=5, x0=3, x2=4 -> 0
  // perm 1 window: x1=1, x3=1, x0=3 -> 2
  // perm 2 window: x2=4, x4=5, x0=3 -> 1
  CHECK(code.symbols == std::vector<Symbol>{0, 2, 1});
  const double ties[] = {1, 1, 1, 1, 1};
  CHECK(wta_encode(ties, spec).symbols == std::vector<Symbol>{0, 0, 0});
}

TEST_CASE("wta spec validation") {
  CHECK_THROWS_AS(WtaSpec({{0, 0, 1}}, 2), Error);
  CHECK_THROWS_AS(WtaSpec({{0, 1, 2}}, 4), Error);
  CHECK_THROWS_AS(WtaSpec({{0, 1, 2}}, 1), Error);
  CHECK_THROWS_AS(WtaSpec({{0, 1, 2}, {0, 1}}, 2), Error);
  Rng rng(1);
  const auto spec = make_wta_spec(10, 4, 9, rng);
  CHECK(spec.length() == 10);
  for (const auto& p : spec.permutations()) {
    std::vector<std::size_t> sorted(p);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 9; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("wta_as_rsh rows are basis vectors") {
  const WtaSpec spec({{2, 0, 1}}, 2);
  const auto model = wta_as_rsh(spec);
  CHECK(model.subspaces() == 2);
  const Matrix& W = model.projection(0).rows();
  CHECK(W(0, 2) == 1.0);
  CHECK(W(1, 0) == 1.0);
  CHECK(W.sum() == 2.0);
}

TEST_CASE("lsh encodes signs with zero mapped to one") {
  Matrix planes(3, 2);
  planes << 1, 0, 0, 1, 1, -1;
  const LshSpec spec(planes);
  const double x[] = {1.0, -2.0};
  CHECK(lsh_encode(x, spec).symbols == std::vector<Symbol>{1, 0, 1});
  const double zero[] = {0.0, 0.0};
  CHECK(lsh_encode(zero, spec).symbols == std::vector<Symbol>{1, 1, 1});
}

TEST_CASE("bits per symbol") {
  CHECK(bits_per_symbol(2) == 1);
  CHECK(bits_per_symbol(3) == 2);
  CHECK(bits_per_symbol(4) == 2);
  CHECK(bits_per_symbol(5) == 3);
  CHECK(bits_per_symbol(8) == 3);
  CHECK(bits_per_symbol(65536) == 16);
}

TEST_CASE("packing layout and round trip") {
  const CodeWord code{{3, 0, 2, 1}};
  const auto packed = pack_code(code, 4);
  CHECK(packed.bit_count == 8);
  REQUIRE(packed.bytes.size() == 1);
  CHECK(packed.bytes[0] == 0b11001001);
  CHECK(unpack_code(packed, 4, 4) == code);
  CHECK_THROWS_AS(pack_code(CodeWord{{4}}, 4), Error);

  Rng rng(2);
  for (std::size_t K : {2u, 3u, 5u, 8u, 300u}) {
    CodeWord c;
    for (int l = 0; l < 13; ++l) c.symbols.push_back(static_cast<Symbol>(rng.uniform_index(K)));
    CHECK(unpack_code(pack_code(c, K), 13, K) == c);
  }
}

TEST_CASE("code length in bits for L = 6, K = 4") {
  CodeWord c{{0, 1, 2, 3, 0, 1}};
  CHECK(pack_code(c, 4).bit_count == 12);
}
