#include "doctest.h"

#include <omp.h>

#include "rsh/eval.hpp"
#include "rsh/hashers.hpp"
#include "rsh/kernels.hpp"

using namespace rsh;

namespace {

Matrix random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("serial and omp kernels are bit-identical") {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);  // oversubscribe even on one core
  Rng rng(11);
  const Matrix rows = random_rows(123, 9, 1);
  const Matrix other = random_rows(37, 9, 2);
  std::vector<ProjectionMatrix> proj;
  for (int l = 0; l < 7; ++l) proj.push_back(init_projection(5, 9, rng));
  const auto wta = make_wta_spec(6, 3, 9, rng);
  const auto lsh = make_lsh_spec(20, 9, rng);

  CHECK(kernels::serial::encode_rsh(rows, proj) == kernels::omp::encode_rsh(rows, proj));
  CHECK(kernels::serial::encode_wta(rows, wta) == kernels::omp::encode_wta(rows, wta));
  CHECK(kernels::serial::encode_lsh(rows, lsh) == kernels::omp::encode_lsh(rows, lsh));
  CHECK(kernels::serial::squared_distances(other, rows) ==
        kernels::omp::squared_distances(other, rows));
  const auto a = kernels::serial::encode_rsh(other, proj);
  const auto b = kernels::serial::encode_rsh(rows, proj);
  CHECK(kernels::serial::symbol_distances(a, b) == kernels::omp::symbol_distances(a, b));
  const Vector mean = rows.colwise().mean().transpose();
  CHECK(kernels::serial::covariance(rows, mean) == kernels::omp::covariance(rows, mean));
  omp_set_num_threads(saved);
}

TEST_CASE("squared distances against a direct formula") {
  const Matrix q = random_rows(5, 4, 3);
  const Matrix db = random_rows(8, 4, 4);
  const Matrix d = kernels::serial::squared_distances(q, db);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) {
      CHECK(d(i, j) == doctest::Approx((q.row(i) - db.row(j)).squaredNorm()).epsilon(1e-14));
    }
  }
}

TEST_CASE("symbol distances against symbol_hamming") {
  Rng rng(5);
  std::vector<CodeWord> a(6), b(9);
  for (auto* set : {&a, &b}) {
    for (auto& c : *set) {
      for (int l = 0; l < 10; ++l) c.symbols.push_back(static_cast<Symbol>(rng.uniform_index(3)));
    }
  }
  const auto d = kernels::omp::symbol_distances(a, b);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 9; ++j) CHECK(d[i * 9 + j] == symbol_hamming(a[i], b[j]));
  }
}

TEST_CASE("covariance against Eigen") {
  const Matrix rows = random_rows(50, 6, 6);
  const Vector mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - mean.transpose();
  const Matrix expected = centered.transpose() * centered / 49.0;
  CHECK(kernels::omp::covariance(rows, mean).isApprox(expected, 1e-12));
  const Matrix one = random_rows(1, 3, 7);
  CHECK(kernels::omp::covariance(one, one.row(0).transpose()).isZero());
}

TEST_CASE("encode_rsh rejects mismatched projections") {
  Rng rng(1);
  const Matrix rows = random_rows(3, 4, 1);
  std::vector<ProjectionMatrix> proj{init_projection(2, 5, rng)};
  CHECK_THROWS_AS(kernels::omp::encode_rsh(rows, proj), Error);
}
