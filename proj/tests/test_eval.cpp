#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rsh/eval.hpp"

using namespace rsh;

namespace {

CodeWord cw(std::initializer_list<Symbol> s) { return CodeWord{std::vector<Symbol>(s)}; }

std::vector<CodeWord> random_codes(std::size_t n, std::size_t L, std::size_t K, Rng& rng) {
  std::vector<CodeWord> out(n);
  for (auto& c : out) {
    for (std::size_t l = 0; l < L; ++l) c.symbols.push_back(static_cast<Symbol>(rng.uniform_index(K)));
  }
  return out;
}

}  // namespace

TEST_CASE("distances") {
  CHECK(symbol_hamming(cw({1, 2, 3}), cw({1, 0, 3})) == 1);
  CHECK(symbol_hamming(cw({}), cw({})) == 0);
  CHECK_THROWS_AS(symbol_hamming(cw({1}), cw({1, 2})), Error);
  const double theta[] = {0.5, 2.0, -1.0};
  CHECK(weighted_similarity(cw({1, 2, 3}), cw({1, 0, 3}), theta) == -0.5);
}

TEST_CASE("ball volume") {
  Rng rng(1);
  const auto codes = random_codes(5, 4, 3, rng);
  const std::vector<Id> ids{0, 1, 2, 3, 4};
  const HashTable t(codes, ids, 3);
  CHECK(t.ball_volume(0) == 1.0);
  CHECK(t.ball_volume(1) == 1.0 + 4 * 2);
  CHECK(t.ball_volume(2) == 1.0 + 8 + 6 * 4);
  CHECK(t.ball_volume(9) == 81.0);
}

TEST_CASE("lookup strategies agree with a linear scan") {
  Rng rng(2);
  for (std::size_t K : {2u, 3u, 5u}) {
    const auto codes = random_codes(300, 6, K, rng);
    std::vector<Id> ids(300);
    for (std::size_t i = 0; i < 300; ++i) ids[i] = static_cast<Id>(1000 - 3 * i);
    const auto table = build_table(codes, ids, K);
    CHECK(table.size() == 300);
    const auto queries = random_codes(20, 6, K, rng);
    for (const auto& q : queries) {
      for (std::size_t R = 0; R <= 6; ++R) {
        std::vector<Id> expected;
        for (std::size_t i = 0; i < 300; ++i) {
          if (symbol_hamming(codes[i], q) <= R) expected.push_back(ids[i]);
        }
        std::sort(expected.begin(), expected.end());
        CHECK(table.lookup_by_expansion(q, R) == expected);
        CHECK(table.lookup_by_scan(q, R) == expected);
        CHECK(table.lookup(q, R) == expected);
      }
    }
  }
}

TEST_CASE("table rejects bad input") {
  const std::vector<CodeWord> codes{cw({0, 1}), cw({1})};
  const std::vector<Id> ids{1, 2};
  CHECK_THROWS_AS(HashTable(codes, ids, 2), Error);
  const std::vector<CodeWord> ok{cw({0, 1})};
  const std::vector<Id> two{1, 2};
  CHECK_THROWS_AS(HashTable(ok, two, 2), Error);
}

TEST_CASE("knn ordering and ties") {
  const std::vector<CodeWord> codes{cw({0, 0}), cw({1, 1}), cw({0, 1}), cw({1, 0}), cw({0, 0})};
  const std::vector<Id> ids{9, 4, 7, 2, 5};
  CHECK(knn_hamming(codes, ids, cw({0, 0}), 3) == std::vector<Id>{5, 9, 2});
  CHECK(knn_hamming(codes, ids, cw({0, 0}), 5) == std::vector<Id>{5, 9, 2, 7, 4});
  CHECK_THROWS_AS(knn_hamming(codes, ids, cw({0, 0}), 6), Error);
  const double theta[] = {3.0, 1.0};
  // Similarities to (0,0): 4, 0, 3, 1, 4.
  CHECK(knn_weighted(codes, ids, cw({0, 0}), theta, 4) == std::vector<Id>{5, 9, 7, 2});
}

TEST_CASE("precision and recall") {
  const Id r[] = {1, 2, 3};
  const Id rel[] = {2, 3, 4, 5};
  CHECK(*precision(r, rel) == doctest::Approx(2.0 / 3.0));
  CHECK(*recall(r, rel) == 0.5);
  CHECK_FALSE(precision({}, rel).has_value());
  CHECK_FALSE(recall(r, {}).has_value());
}

TEST_CASE("pr curve and average precision on a worked example") {
  const std::vector<CodeWord> db{cw({0, 0}), cw({0, 1}), cw({1, 1})};
  const std::vector<Id> ids{0, 1, 2};
  const std::vector<CodeWord> queries{cw({0, 0}), cw({1, 1})};
  GroundTruth gt;
  gt.neighbor_lists = {{0, 2}, {}};  // second query is skipped
  const auto curve = pr_curve_by_radius(db, ids, queries, gt);
  REQUIRE(curve.size() == 3);
  CHECK(*curve[0].precision == 1.0);
  CHECK(curve[0].recall == 0.5);
  CHECK(*curve[1].precision == 0.5);
  CHECK(curve[1].recall == 0.5);
  CHECK(*curve[2].precision == doctest::Approx(2.0 / 3.0));
  CHECK(curve[2].recall == 1.0);
  CHECK(average_precision(curve) == doctest::Approx(0.5 + 0.5 * 2.0 / 3.0));

  const std::size_t radii[] = {0, 1};
  const std::size_t ks[] = {1, 2};
  const auto m = evaluate_retrieval(db, ids, queries, gt, radii, ks);
  CHECK(m.evaluated_queries == 1);
  CHECK(m.precision_at_radius.at(0) == 1.0);
  CHECK(m.precision_at_radius.at(1) == 0.5);
  CHECK(m.precision_at_k.at(1) == 1.0);
  CHECK(m.precision_at_k.at(2) == 0.5);  // ties at distance 1 break toward id 1
  CHECK(m.average_precision == doctest::Approx(average_precision(curve)));
}

TEST_CASE("average precision against a direct per-radius computation") {
  Rng rng(3);
  const auto db = random_codes(120, 5, 3, rng);
  std::vector<Id> ids(120);
  for (std::size_t i = 0; i < 120; ++i) ids[i] = static_cast<Id>(i);
  const auto queries = random_codes(15, 5, 3, rng);
  GroundTruth gt;
  for (std::size_t q = 0; q < 15; ++q) {
    std::vector<Id> rel;
    for (std::size_t i = 0; i < 120; ++i) {
      if (rng.uniform() < 0.2) rel.push_back(static_cast<Id>(i));
    }
    gt.neighbor_lists.push_back(rel);
  }
  const auto table = build_table(db, ids, 3);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t R = 0; R <= 5; ++R) {
    double psum = 0.0, rsum = 0.0;
    std::size_t answered = 0, evaluated = 0;
    for (std::size_t q = 0; q < 15; ++q) {
      if (gt.neighbor_lists[q].empty()) continue;
      ++evaluated;
      const auto got = table.lookup(queries[q], R);
      rsum += *recall(got, gt.neighbor_lists[q]);
      if (auto p = precision(got, gt.neighbor_lists[q])) {
        psum += *p;
        ++answered;
      }
    }
    const double rec = rsum / static_cast<double>(evaluated);
    if (answered > 0) ap += (rec - prev_recall) * psum / static_cast<double>(answered);
    prev_recall = rec;
  }
  const auto curve = pr_curve_by_radius(db, ids, queries, gt);
  CHECK(average_precision(curve) == doctest::Approx(ap).epsilon(1e-12));
}

TEST_CASE("unanswered radius reports zero precision") {
  const std::vector<CodeWord> db{cw({0, 0})};
  const std::vector<Id> ids{0};
  const std::vector<CodeWord> queries{cw({1, 1})};
  GroundTruth gt;
  gt.neighbor_lists = {{0}};
  const std::size_t radii[] = {0};
  const std::size_t ks[] = {1};
  const auto m = evaluate_retrieval(db, ids, queries, gt, radii, ks);
  CHECK(m.precision_at_radius.at(0) == 0.0);
}

TEST_CASE("aggregate runs") {
  const double v[] = {1.0, 2.0, 3.0, 4.0};
  const auto a = aggregate_runs(v);
  CHECK(a.mean == 2.5);
  CHECK(a.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  const double one[] = {7.0};
  CHECK(aggregate_runs(one).stddev == 0.0);
  CHECK_THROWS_AS(aggregate_runs({}), Error);
}
