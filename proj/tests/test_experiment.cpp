#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../src/binary_io.hpp"
#include "rsh/config.hpp"
#include "rsh/experiment.hpp"
#include "rsh/model_io.hpp"

using namespace rsh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rsh_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read(const fs::path& p) { return detail::read_file(p.string()); }

struct Run {
  int status;
  std::string stderr_text;
};

Run rshash(const std::string& args, const fs::path& dir) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(RSHASH_BINARY) + " " + args + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  return {WEXITSTATUS(raw), fs::exists(err) ? read(err) : ""};
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

const char* kSmall =
    "synthetic = true\n"
    "synth_per_cluster = 60\n"
    "synth_dim = 8\n"
    "train_count = 120\n"
    "query_count = 60\n"
    "groundtruth = label\n"
    "max_pairs = 2000\n"
    "K = 4\n"
    "L = 6\n"
    "epochs = 8\n"
    "L_list = 4, 8\n"
    "radii = 2, 3\n"
    "knn = 5, 10\n"
    "seed = 11\n";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config("# comment\ninput = data.csv  # trailing\nK = 8\nrho = 0.5\nmethods = rsh, lsh\n");
  CHECK(c.input == "data.csv");
  CHECK(c.hyper.K == 8);
  CHECK(c.hyper.rho == 0.5);
  CHECK(c.methods == std::vector<std::string>{"rsh", "lsh"});
  CHECK(parse_config(c.to_text()).to_text() == c.to_text());

  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      parse_config("train_count = 100\nquery_count = 100\n" + text).validate();
      FAIL("expected config error for " << field);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  expect_field("synthetic = true\nbogus = 1\n", "bogus");
  expect_field("synthetic = true\nK = 2\nK = 3\n", "K");
  expect_field("synthetic = true\nseeds = 0\n", "seeds");
  expect_field("synthetic = true\nrho_grid = \n", "rho_grid");
  expect_field("synthetic = true\nmethods = rsh, mlh\n", "methods");
  expect_field("synthetic = true\ntrain_count = many\n", "train_count");
  expect_field("synthetic = true\npos_fraction = 1.5\n", "pos_fraction");
  expect_field("synthetic = true\ngroundtruth = magic\n", "groundtruth");
  expect_field("center = true\n", "input");
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0, 1e-300, 2.0 / 3.0, -5.5}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("preprocessor file round trip") {
  Rng rng(1);
  Matrix m(30, 5);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  const Dataset d(m);
  for (std::size_t pca : {0u, 3u}) {
    const auto p = Preprocessor::fit(d, true, pca, true);
    const auto bytes = encode_preprocessor(p);
    const auto back = parse_preprocessor(bytes);
    CHECK(encode_preprocessor(back) == bytes);
    CHECK(back.apply(d).features() == p.apply(d).features());
    CHECK_THROWS_AS(parse_preprocessor(bytes.substr(0, bytes.size() - 1)), Error);
  }
}

TEST_CASE("preprocess output shapes on a 4000 x 512 input") {
  const auto dir = scratch("shapes");
  Rng rng(2);
  Matrix m(4000, 512);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  save_fvec(Dataset(m), (dir / "raw.rshv").string());
  auto c = parse_config("input = " + (dir / "raw.rshv").string() + "\npca_dims = 40\n");
  cmd_preprocess(c, dir / "out");
  CHECK(load_fvec((dir / "out" / "train.rshv").string()).size() == 1000);
  CHECK(load_fvec((dir / "out" / "train.rshv").string()).dim() == 40);
  CHECK(load_fvec((dir / "out" / "query.rshv").string()).size() == 3000);
  CHECK(load_fvec((dir / "out" / "query.rshv").string()).dim() == 40);
  fs::remove_all(dir);
}

TEST_CASE("benchmark produces every result group") {
  auto c = parse_config(std::string(kSmall) + "seeds = 3\n");
  c.L_list = {4, 8, 16};
  c.seeds = 1;
  c.hyper.epochs = 3;
  const auto report = run_benchmark(c);
  CHECK(report.runs.size() == 12);
  for (const auto& r : report.runs) {
    if (r.method == "lsh") {
      CHECK(r.bits == r.L * 2);
      CHECK(r.K == 2);
    } else {
      CHECK(r.bits == r.L * 2);
      CHECK(r.K == 4);
    }
    for (const auto& [R, p] : r.test.precision_at_radius) CHECK((p >= 0.0 && p <= 1.0));
    CHECK((r.test.average_precision >= 0.0 && r.test.average_precision <= 1.0));
  }
}

TEST_CASE("sweeping keeps only the best cell per method and length") {
  auto c = parse_config(std::string(kSmall) + "seeds = 3\n");
  c.methods = {"rsh"};
  c.L_list = {4};
  c.seeds = 2;
  c.hyper.epochs = 3;
  c.sweep = true;
  c.K_grid = {2, 4};
  c.rho_grid = {1.0};
  c.lambda_grid = {0.5, 2.0};
  const auto report = run_benchmark(c);
  REQUIRE(report.runs.size() == 2);
  CHECK(report.runs[0].cell == report.runs[1].cell);
  // 2 runs x 5 metrics + 5 x (mean, std)
  CHECK(report.rows.size() == 20);
}

TEST_CASE("select_best_cells uses mean validation AP") {
  RunResult a, b, c2, d;
  a.method = b.method = c2.method = d.method = "rsh";
  a.L = b.L = c2.L = d.L = 8;
  a.cell = c2.cell = {2, 1.0, 1.0};
  b.cell = d.cell = {4, 1.0, 1.0};
  a.validation_ap = 0.9;
  c2.validation_ap = 0.1;  // mean 0.5
  b.validation_ap = 0.6;
  d.validation_ap = 0.6;  // mean 0.6
  const auto kept = select_best_cells({a, b, c2, d});
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].cell.K == 4);
}

TEST_CASE("cli: benchmark is deterministic and writes the metrics schema") {
  const auto dir = scratch("cli_bench");
  write(dir / "c.cfg", std::string(kSmall) + "seeds = 3\n");
  REQUIRE(rshash("benchmark --config " + (dir / "c.cfg").string() + " --out " + (dir / "a").string(), dir).status == 0);
  REQUIRE(rshash("benchmark --config " + (dir / "c.cfg").string() + " --out " + (dir / "b").string(), dir).status == 0);
  const auto a = read(dir / "a" / "metrics.csv");
  CHECK(a == read(dir / "b" / "metrics.csv"));
  CHECK(read(dir / "a" / "summary.json") == read(dir / "b" / "summary.json"));
  CHECK(a.starts_with("method,L_bits,K,seed,metric,value\n"));
  // 4 methods x 2 lengths x 5 metrics x (3 runs + mean + std), plus header.
  CHECK(count_lines(a) == 1 + 4 * 2 * 5 * 5);
  CHECK(a.find("wta,8,4,mean,P@R=2,") != std::string::npos);
  CHECK(a.find("lsh,16,2,std,AP,") != std::string::npos);
  CHECK(fs::exists(dir / "a" / "table_AP.csv"));
  CHECK(fs::exists(dir / "a" / "table_P_R_2.csv"));
  CHECK(fs::exists(dir / "a" / "table_P_10.csv"));

  // --seed overrides the config.
  REQUIRE(rshash("benchmark --config " + (dir / "c.cfg").string() + " --seed 12 --out " + (dir / "s").string(), dir).status == 0);
  CHECK(read(dir / "s" / "metrics.csv") != a);
  fs::remove_all(dir);
}

TEST_CASE("cli: preprocess, train, eval") {
  const auto dir = scratch("cli_pipeline");
  std::string cfg = std::string(kSmall) +
                    "methods = rsh, srsh, lsh\n"
                    "sweep = true\nK_grid = 4\nrho_grid = 0.5, 1\nlambda_grid = 1, 2\n"
                    "seeds = 2\n";
  write(dir / "c.cfg", cfg);
  const auto out = dir / "out";
  const std::string base = " --config " + (dir / "c.cfg").string() + " --out " + out.string();
  REQUIRE(rshash("preprocess" + base, dir).status == 0);
  const auto train_bytes = read(out / "train.rshv");
  REQUIRE(rshash("preprocess" + base, dir).status == 0);
  CHECK(read(out / "train.rshv") == train_bytes);
  CHECK(fs::exists(out / "manifest.txt"));
  // The manifest is a loadable config.
  CHECK(load_config((out / "manifest.txt").string()).to_text() == parse_config(cfg).to_text());

  REQUIRE(rshash("train" + base, dir).status == 0);
  const auto index = read(out / "models.csv");
  // 2 methods x 4 cells x 2 seeds
  CHECK(count_lines(index) == 1 + 16);
  CHECK(fs::exists(out / "rsh_K4_L6_rho0.5_lambda2_seed1.rshm"));
  const auto srsh = load_model_file((out / "srsh_K4_L6_rho1_lambda1_seed0.rshm").string());
  REQUIRE(srsh.weights().has_value());
  CHECK(srsh.weights()->size() == 6);
  const auto log = read(out / "training_log.csv");
  CHECK(log.starts_with("method,K,L,rho,lambda,seed,bit,epoch,surrogate,empirical\n"));
  CHECK(log.find("nan") == std::string::npos);
  CHECK(log.find("inf") == std::string::npos);

  REQUIRE(rshash("eval" + base, dir).status == 0);
  const auto metrics = read(out / "metrics.csv");
  // 3 methods x 5 metrics x (2 runs + mean + std)
  CHECK(count_lines(metrics) == 1 + 3 * 5 * 4);
  std::istringstream rows(metrics);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    const double v = std::stod(line.substr(line.rfind(',') + 1));
    CHECK((v >= 0.0 && v <= 1.0));
  }
  REQUIRE(rshash("eval" + base, dir).status == 0);
  CHECK(read(out / "metrics.csv") == metrics);
  fs::remove_all(dir);
}

TEST_CASE("cli: failures exit nonzero with one categorised line") {
  const auto dir = scratch("cli_errors");
  auto check_error = [&](const std::string& args, const std::string& category) {
    const auto r = rshash(args, dir);
    CHECK(r.status != 0);
    CHECK(r.stderr_text.starts_with("error: " + category + ":"));
    CHECK(count_lines(r.stderr_text) == 1);
  };
  check_error("train --config " + (dir / "missing.cfg").string() + " --out " + dir.string(), "io_error");
  write(dir / "bad.cfg", "synthetic = true\nseeds = 0\n");
  check_error("benchmark --config " + (dir / "bad.cfg").string() + " --out " + dir.string(), "config_error");
  write(dir / "c.cfg", kSmall);
  check_error("eval --config " + (dir / "c.cfg").string() + " --out " + (dir / "empty").string(), "io_error");
  check_error("frobnicate", "usage");

  // A model trained on other data is rejected at eval time.
  write(dir / "a.cfg", std::string(kSmall) + "methods = rsh\nseeds = 1\n");
  std::string other(kSmall);
  other.replace(other.find("synth_dim = 8"), 13, "synth_dim = 5");
  write(dir / "b.cfg", other + "methods = rsh\nseeds = 1\nmodel_dir = " +
                           (dir / "a").string() + "\n");
  const std::string a = " --config " + (dir / "a.cfg").string() + " --out " + (dir / "a").string();
  const std::string b = " --config " + (dir / "b.cfg").string() + " --out " + (dir / "b").string();
  REQUIRE(rshash("preprocess" + a, dir).status == 0);
  REQUIRE(rshash("train" + a, dir).status == 0);
  REQUIRE(rshash("preprocess" + b, dir).status == 0);
  check_error("eval" + b, "dimension_mismatch");
  fs::remove_all(dir);
}
