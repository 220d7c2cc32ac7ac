// Serial reference vs OpenMP kernels. Arg(0) is the serial path, Arg(1) omp.

#include <benchmark/benchmark.h>

#include <vector>

#include "rsh/hashers.hpp"
#include "rsh/kernels.hpp"
#include "rsh/random.hpp"

namespace {

using namespace rsh;

Matrix random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

std::vector<ProjectionMatrix> random_projections(std::size_t L, std::size_t K, std::size_t d) {
  Rng rng(7);
  std::vector<ProjectionMatrix> out;
  for (std::size_t l = 0; l < L; ++l) out.push_back(init_projection(K, d, rng));
  return out;
}

void BM_EncodeRsh(benchmark::State& state) {
  const Matrix rows = random_rows(4000, 64, 1);
  const auto proj = random_projections(32, 8, 64);
  for (auto _ : state) {
    auto codes = state.range(0) ? kernels::omp::encode_rsh(rows, proj)
                                : kernels::serial::encode_rsh(rows, proj);
    benchmark::DoNotOptimize(codes.data());
  }
}
BENCHMARK(BM_EncodeRsh)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SquaredDistances(benchmark::State& state) {
  const Matrix q = random_rows(500, 64, 2);
  const Matrix db = random_rows(2000, 64, 3);
  for (auto _ : state) {
    auto d = state.range(0) ? kernels::omp::squared_distances(q, db)
                            : kernels::serial::squared_distances(q, db);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_SquaredDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SymbolDistances(benchmark::State& state) {
  const auto proj = random_projections(32, 4, 32);
  const auto q = kernels::serial::encode_rsh(random_rows(500, 32, 4), proj);
  const auto db = kernels::serial::encode_rsh(random_rows(4000, 32, 5), proj);
  for (auto _ : state) {
    auto d = state.range(0) ? kernels::omp::symbol_distances(q, db)
                            : kernels::serial::symbol_distances(q, db);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_SymbolDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Covariance(benchmark::State& state) {
  const Matrix rows = random_rows(5000, 128, 6);
  const Vector mean = rows.colwise().mean().transpose();
  for (auto _ : state) {
    auto c = state.range(0) ? kernels::omp::covariance(rows, mean)
                            : kernels::serial::covariance(rows, mean);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_Covariance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
