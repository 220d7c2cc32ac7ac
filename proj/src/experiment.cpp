#include "rsh/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "binary_io.hpp"
#include "json.hpp"
#include "rsh/hashers.hpp"
#include "rsh/model_io.hpp"

namespace rsh {

namespace fs = std::filesystem;

namespace {

bool is_learned(const std::string& method) { return method == "rsh" || method == "srsh"; }

std::vector<int> load_labels(const std::string& path, std::size_t expected) {
  const std::string text = detail::read_file(path);
  std::istringstream in(text);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream field(line);
    int v = 0;
    std::string rest;
    if (!(field >> v) || (field >> rest)) {
      fail(ErrorKind::Parse, path + " line " + std::to_string(line_no) + ": expected one integer label");
    }
    labels.push_back(v);
  }
  require(labels.size() == expected, ErrorKind::DimensionMismatch,
          path + ": " + std::to_string(labels.size()) + " labels for " + std::to_string(expected) +
              " rows");
  return labels;
}

std::string labels_text(const std::vector<int>& labels) {
  std::string out;
  for (int v : labels) out += std::to_string(v) + "\n";
  return out;
}

std::vector<int> pick(const std::vector<int>& labels, const std::vector<std::size_t>& rows) {
  if (labels.empty()) return {};
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(labels[r]);
  return out;
}

fs::path dir_or(const std::string& configured, const fs::path& fallback) {
  return configured.empty() ? fallback : fs::path(configured);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, std::string_view text) {
  detail::write_file(path.string(), text);
}

std::vector<std::string> metric_names(const ExperimentConfig& config) {
  std::vector<std::string> names;
  for (auto R : config.radii) names.push_back("P@R=" + std::to_string(R));
  for (auto k : config.knn) names.push_back("P@" + std::to_string(k));
  names.push_back("AP");
  return names;
}

std::vector<double> metric_values(const ExperimentConfig& config, const RetrievalMetrics& m) {
  std::vector<double> values;
  for (auto R : config.radii) values.push_back(m.precision_at_radius.at(R));
  for (auto k : config.knn) values.push_back(m.precision_at_k.at(k));
  values.push_back(m.average_precision);
  return values;
}

std::string cell_tag(const std::string& method, std::size_t K, std::size_t L,
                     const CellParams& cell, std::size_t run) {
  return method + "_K" + std::to_string(K) + "_L" + std::to_string(L) + "_rho" +
         format_double(cell.rho) + "_lambda" + format_double(cell.lambda) + "_seed" +
         std::to_string(run);
}

PreparedData load_prepared(const fs::path& dir) {
  const auto train_path = dir / "train.rshv";
  const auto query_path = dir / "query.rshv";
  PreparedData data{load_fvec(train_path.string()), load_fvec(query_path.string()), {}, {}, {}, {}, 0, 0};
  require(data.train.dim() == data.query.dim(), ErrorKind::DimensionMismatch,
          "train and query files have different dimensions");
  if (fs::exists(dir / "train_labels.txt")) {
    data.train_labels = load_labels((dir / "train_labels.txt").string(), data.train.size());
    data.query_labels = load_labels((dir / "query_labels.txt").string(), data.query.size());
  }
  data.preprocessor = parse_preprocessor(detail::read_file((dir / "preprocess.bin").string()));
  return data;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t run_seed, Stream stream) {
  return child_seed(run_seed, static_cast<std::uint64_t>(stream));
}

std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run) {
  return child_seed(config.hyper.seed, run);
}

PreparedData prepare_data(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  std::optional<Dataset> raw;
  std::vector<int> labels;
  if (config.synthetic) {
    Rng rng(stream_seed(seed, Stream::Synthetic));
    auto synth = synth_clusters(config.synth_clusters, config.synth_per_cluster, config.synth_dim,
                                config.synth_separation, config.synth_noise, rng);
    raw.emplace(std::move(synth.data));
    labels = std::move(synth.labels);
  } else {
    raw.emplace(load_dataset(config.input));
    if (!config.labels.empty()) labels = load_labels(config.labels, raw->size());
  }
  Rng split_rng(stream_seed(seed, Stream::Split));
  Split split = random_split(raw->size(), config.train_count, config.query_count, split_rng);
  const Dataset train_raw = raw->subset(split.train);
  const Dataset query_raw = raw->subset(split.query);
  Preprocessor prep =
      Preprocessor::fit(train_raw, config.center, config.pca_dims, config.normalize);
  PreparedData out{prep.apply(train_raw),   prep.apply(query_raw), pick(labels, split.train),
                   pick(labels, split.query), std::move(prep),      std::move(split),
                   raw->size(),             raw->dim()};
  return out;
}

Supervision build_supervision(const ExperimentConfig& config, const PreparedData& data,
                              std::uint64_t seed) {
  Rng rng(stream_seed(seed, Stream::Pairs));
  if (config.groundtruth == "label") {
    require(!data.train_labels.empty(), ErrorKind::Config,
            "config field 'groundtruth': label groundtruth requested but no labels are available");
    auto query_truth = groundtruth_by_label(data.train, data.train_labels, data.query_labels);
    auto train_truth = groundtruth_by_label(data.train, data.train_labels, data.train_labels);
    auto pairs = make_pairs_by_label(data.train_labels, config.max_pairs, config.pos_fraction, rng);
    return {std::move(query_truth), std::move(train_truth), std::move(pairs)};
  }
  auto query_truth = calibrate_groundtruth(data.train, data.query, config.target_neighbors);
  auto train_truth = groundtruth_at_threshold(data.train, data.train, query_truth.threshold);
  auto pairs = make_pairs(data.train, query_truth.threshold, config.max_pairs,
                          config.pos_fraction, rng);
  return {std::move(query_truth), std::move(train_truth), std::move(pairs)};
}

std::vector<CellParams> grid_cells(const ExperimentConfig& config) {
  if (!config.sweep) return {{config.hyper.K, config.hyper.rho, config.hyper.lambda}};
  std::vector<CellParams> cells;
  for (auto K : config.K_grid) {
    for (double rho : config.rho_grid) {
      for (double lambda : config.lambda_grid) cells.push_back({K, rho, lambda});
    }
  }
  return cells;
}

RunResult evaluate_codes(const ExperimentConfig& config, const std::string& method,
                         std::size_t L, std::size_t K, std::size_t bits, const CellParams& cell,
                         const PreparedData& data, const Supervision& sup, std::size_t run,
                         const std::vector<CodeWord>& train_codes,
                         const std::vector<CodeWord>& query_codes,
                         const std::optional<std::vector<double>>& theta) {
  RunResult r;
  r.method = method;
  r.L = L;
  r.K = K;
  r.bits = bits;
  r.cell = cell;
  r.run = run;
  std::optional<std::span<const double>> theta_view;
  if (theta) theta_view = std::span<const double>(*theta);
  r.test = evaluate_retrieval(train_codes, data.train.ids(), query_codes, sup.query_truth,
                              config.radii, config.knn, theta_view);
  r.validation_ap = average_precision(
      pr_curve_by_radius(train_codes, data.train.ids(), train_codes, sup.train_truth));
  return r;
}

RunResult run_method(const ExperimentConfig& config, const std::string& method, std::size_t L,
                     const CellParams& cell, const PreparedData& data, const Supervision& sup,
                     std::size_t run) {
  const std::uint64_t seed = run_seed(config, run);
  if (is_learned(method)) {
    Hyperparams hyper = config.hyper;
    hyper.K = cell.K;
    hyper.rho = cell.rho;
    hyper.lambda = cell.lambda;
    hyper.L = L;
    hyper.seed = stream_seed(seed, Stream::Training);
    const auto trained = method == "rsh" ? train_rsh(data.train, sup.pairs, hyper)
                                         : train_srsh(data.train, sup.pairs, hyper);
    const auto& model = trained.model;
    return evaluate_codes(config, method, L, cell.K, L * bits_per_symbol(cell.K), cell, data, sup,
                          run, encode_dataset(data.train, model), encode_dataset(data.query, model),
                          model.weights());
  }
  if (method == "wta") {
    Rng rng(stream_seed(seed, Stream::Wta));
    const auto spec = make_wta_spec(L, config.wta_K, data.train.dim(), rng);
    return evaluate_codes(config, method, L, config.wta_K, L * bits_per_symbol(config.wta_K),
                          {config.wta_K, 0.0, 0.0}, data, sup, run,
                          wta_encode_dataset(data.train, spec), wta_encode_dataset(data.query, spec),
                          std::nullopt);
  }
  if (method == "lsh") {
    // Same bit budget as the learned methods at this L.
    const std::size_t bits = L * bits_per_symbol(config.hyper.K);
    Rng rng(stream_seed(seed, Stream::Lsh));
    const auto spec = make_lsh_spec(bits, data.train.dim(), rng);
    return evaluate_codes(config, method, L, 2, bits, {2, 0.0, 0.0}, data, sup, run,
                          lsh_encode_dataset(data.train, spec), lsh_encode_dataset(data.query, spec),
                          std::nullopt);
  }
  fail(ErrorKind::Config, "config field 'methods': unknown method '" + method + "'");
}

std::vector<RunResult> select_best_cells(const std::vector<RunResult>& runs) {
  // Mean validation AP per (method, L, cell), cells in first-seen order.
  struct CellScore {
    CellParams cell;
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::pair<std::string, std::size_t>, std::vector<CellScore>> scores;
  for (const auto& r : runs) {
    auto& cells = scores[{r.method, r.L}];
    auto it = std::find_if(cells.begin(), cells.end(),
                           [&](const CellScore& c) { return c.cell == r.cell; });
    if (it == cells.end()) it = cells.insert(cells.end(), CellScore{r.cell});
    it->sum += r.validation_ap;
    ++it->n;
  }
  std::map<std::pair<std::string, std::size_t>, CellParams> best;
  for (const auto& [key, cells] : scores) {
    const CellScore* winner = &cells.front();
    for (const auto& c : cells) {
      if (c.sum / static_cast<double>(c.n) > winner->sum / static_cast<double>(winner->n)) {
        winner = &c;
      }
    }
    best.emplace(key, winner->cell);
  }
  std::vector<RunResult> out;
  for (const auto& r : runs) {
    if (best.at({r.method, r.L}) == r.cell) out.push_back(r);
  }
  return out;
}

namespace {

// (method, L) groups in first-seen order, each with its runs in order.
std::vector<std::vector<const RunResult*>> group_runs(const std::vector<RunResult>& runs) {
  std::vector<std::vector<const RunResult*>> groups;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index;
  for (const auto& r : runs) {
    auto [it, inserted] = index.try_emplace({r.method, r.L}, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(),
                     [](const RunResult* a, const RunResult* b) { return a->run < b->run; });
  }
  return groups;
}

}  // namespace

std::vector<MetricRow> metric_rows(const ExperimentConfig& config,
                                   const std::vector<RunResult>& runs) {
  const auto names = metric_names(config);
  std::vector<MetricRow> rows;
  for (const auto& group : group_runs(runs)) {
    const RunResult& first = *group.front();
    std::vector<std::vector<double>> per_metric(names.size());
    for (const RunResult* r : group) {
      const auto values = metric_values(config, r->test);
      for (std::size_t m = 0; m < names.size(); ++m) {
        rows.push_back({r->method, r->bits, r->K, std::to_string(r->run), names[m], values[m]});
        per_metric[m].push_back(values[m]);
      }
    }
    for (std::size_t m = 0; m < names.size(); ++m) {
      const auto agg = aggregate_runs(per_metric[m]);
      rows.push_back({first.method, first.bits, first.K, "mean", names[m], agg.mean});
      rows.push_back({first.method, first.bits, first.K, "std", names[m], agg.stddev});
    }
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "method,L_bits,K,seed,metric,value\n";
  for (const auto& r : rows) {
    out += r.method + "," + std::to_string(r.bits) + "," + std::to_string(r.K) + "," + r.seed +
           "," + r.metric + "," + format_double(r.value) + "\n";
  }
  return out;
}

std::string summary_json(const ExperimentConfig& config, const std::vector<RunResult>& runs) {
  using nlohmann::ordered_json;
  const auto names = metric_names(config);
  ordered_json results = ordered_json::array();
  for (const auto& group : group_runs(runs)) {
    const RunResult& first = *group.front();
    ordered_json entry;
    entry["method"] = first.method;
    entry["L"] = first.L;
    entry["L_bits"] = first.bits;
    entry["K"] = first.K;
    if (is_learned(first.method)) {
      entry["rho"] = first.cell.rho;
      entry["lambda"] = first.cell.lambda;
    }
    entry["runs"] = group.size();
    ordered_json metrics;
    for (std::size_t m = 0; m < names.size(); ++m) {
      std::vector<double> values;
      for (const RunResult* r : group) values.push_back(metric_values(config, r->test)[m]);
      const auto agg = aggregate_runs(values);
      metrics[names[m]] = {{"mean", agg.mean}, {"std", agg.stddev}};
    }
    entry["metrics"] = std::move(metrics);
    results.push_back(std::move(entry));
  }
  ordered_json doc;
  doc["seed"] = config.hyper.seed;
  doc["seeds"] = config.seeds;
  doc["results"] = std::move(results);
  return doc.dump(2) + "\n";
}

BenchmarkReport run_benchmark(const ExperimentConfig& config) {
  config.validate();
  std::vector<RunResult> all;
  for (std::size_t run = 0; run < config.seeds; ++run) {
    const auto seed = run_seed(config, run);
    const PreparedData data = prepare_data(config, seed);
    const Supervision sup = build_supervision(config, data, seed);
    for (std::size_t L : config.L_list) {
      for (const auto& method : config.methods) {
        const auto cells = is_learned(method) ? grid_cells(config)
                                              : std::vector<CellParams>{{0, 0.0, 0.0}};
        for (const auto& cell : cells) all.push_back(run_method(config, method, L, cell, data, sup, run));
      }
    }
  }
  BenchmarkReport report;
  report.runs = select_best_cells(all);
  report.rows = metric_rows(config, report.runs);
  return report;
}

std::string encode_preprocessor(const Preprocessor& p) {
  detail::ByteWriter w;
  w.bytes("RSHP1");
  const auto d = static_cast<std::uint64_t>(p.mean.size());
  const std::uint64_t m = p.pca ? p.pca->dims() : 0;
  w.u64(d);
  w.u64(m);
  w.u8(p.normalize ? 1 : 0);
  for (Eigen::Index i = 0; i < p.mean.size(); ++i) w.f64(p.mean(i));
  if (p.pca) {
    for (Eigen::Index i = 0; i < p.pca->mean.size(); ++i) w.f64(p.pca->mean(i));
    for (Eigen::Index i = 0; i < p.pca->components.size(); ++i) w.f64(p.pca->components.data()[i]);
    for (Eigen::Index i = 0; i < p.pca->eigenvalues.size(); ++i) w.f64(p.pca->eigenvalues(i));
  }
  return w.take();
}

Preprocessor parse_preprocessor(std::string_view bytes) {
  detail::ByteReader r(bytes, "preprocessor");
  if (r.bytes(5) != "RSHP1") r.error("bad magic");
  const auto d = r.u64();
  const auto m = r.u64();
  const auto normalize = r.u8();
  if (d == 0 || m > d || normalize > 1) r.error("invalid header");
  if (r.remaining() / 8 / d < 1 + (m ? 1 + m : 0)) r.error("truncated input");
  Preprocessor p;
  p.normalize = normalize == 1;
  p.mean.resize(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < p.mean.size(); ++i) p.mean(i) = r.f64();
  if (m > 0) {
    PcaBasis basis;
    basis.mean.resize(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < basis.mean.size(); ++i) basis.mean(i) = r.f64();
    basis.components.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < basis.components.size(); ++i) basis.components.data()[i] = r.f64();
    basis.eigenvalues.resize(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) basis.eigenvalues(i) = r.f64();
    p.pca = std::move(basis);
  }
  if (r.remaining() != 0) r.error("trailing bytes");
  return p;
}

void cmd_preprocess(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  ensure_dir(out);
  const PreparedData data = prepare_data(config, config.hyper.seed);
  save_fvec(data.train, (out / "train.rshv").string());
  save_fvec(data.query, (out / "query.rshv").string());
  if (!data.train_labels.empty()) {
    write_text(out / "train_labels.txt", labels_text(data.train_labels));
    write_text(out / "query_labels.txt", labels_text(data.query_labels));
  }
  write_text(out / "preprocess.bin", encode_preprocessor(data.preprocessor));

  std::string split = "role,row\n";
  for (auto r : data.split.train) split += "train," + std::to_string(r) + "\n";
  for (auto r : data.split.query) split += "query," + std::to_string(r) + "\n";
  write_text(out / "split.csv", split);

  // The manifest is itself a valid config; derived facts are comments.
  std::string manifest = "# rshash preprocess manifest\n";
  manifest += config.to_text();
  manifest += "# raw_rows = " + std::to_string(data.raw_rows) + "\n";
  manifest += "# raw_dim = " + std::to_string(data.raw_dim) + "\n";
  manifest += "# output_dim = " + std::to_string(data.train.dim()) + "\n";
  manifest += "# train_rows = " + std::to_string(data.train.size()) + "\n";
  manifest += "# query_rows = " + std::to_string(data.query.size()) + "\n";
  write_text(out / "manifest.txt", manifest);
}

void cmd_train(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  ensure_dir(out);
  const PreparedData data = load_prepared(dir_or(config.data_dir, out));
  std::string index = "method,K,L,rho,lambda,seed,file\n";
  std::string log = "method,K,L,rho,lambda,seed,bit,epoch,surrogate,empirical\n";
  std::string boost = "method,K,L,rho,lambda,seed,bit,epsilon,theta\n";
  for (std::size_t run = 0; run < config.seeds; ++run) {
    const auto seed = run_seed(config, run);
    const Supervision sup = build_supervision(config, data, seed);
    for (const auto& method : config.methods) {
      if (!is_learned(method)) continue;
      for (const auto& cell : grid_cells(config)) {
        Hyperparams hyper = config.hyper;
        hyper.K = cell.K;
        hyper.rho = cell.rho;
        hyper.lambda = cell.lambda;
        hyper.seed = stream_seed(seed, Stream::Training);
        const auto trained = method == "rsh" ? train_rsh(data.train, sup.pairs, hyper)
                                             : train_srsh(data.train, sup.pairs, hyper);
        const std::string tag = cell_tag(method, cell.K, hyper.L, cell, run);
        const std::string file = tag + ".rshm";
        save_model_file(trained.model, (out / file).string());
        const std::string prefix = method + "," + std::to_string(cell.K) + "," +
                                   std::to_string(hyper.L) + "," + format_double(cell.rho) + "," +
                                   format_double(cell.lambda) + "," + std::to_string(run);
        index += prefix + "," + file + "\n";
        for (std::size_t bit = 0; bit < trained.traces.size(); ++bit) {
          const auto& t = trained.traces[bit];
          for (std::size_t e = 0; e < t.surrogate.size(); ++e) {
            log += prefix + "," + std::to_string(bit) + "," + std::to_string(e) + "," +
                   format_double(t.surrogate[e]) + "," + format_double(t.empirical[e]) + "\n";
          }
        }
        for (std::size_t bit = 0; bit < trained.boosting.size(); ++bit) {
          boost += prefix + "," + std::to_string(bit) + "," +
                   format_double(trained.boosting[bit].epsilon) + "," +
                   format_double(trained.boosting[bit].theta) + "\n";
        }
      }
    }
  }
  write_text(out / "models.csv", index);
  write_text(out / "training_log.csv", log);
  write_text(out / "boosting_log.csv", boost);
}

void cmd_eval(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  ensure_dir(out);
  const PreparedData data = load_prepared(dir_or(config.data_dir, out));
  const fs::path model_dir = dir_or(config.model_dir, out);

  struct Entry {
    std::string method;
    CellParams cell;
    std::size_t run;
    std::string file;
  };
  std::vector<Entry> entries;
  if (std::any_of(config.methods.begin(), config.methods.end(), is_learned)) {
    std::istringstream in(detail::read_file((model_dir / "models.csv").string()));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::istringstream fields(line);
      for (std::string item; std::getline(fields, item, ',');) f.push_back(item);
      if (f.size() != 7) fail(ErrorKind::Parse, "models.csv: malformed line '" + line + "'");
      entries.push_back({f[0], {std::stoul(f[1]), std::stod(f[3]), std::stod(f[4])},
                         std::stoul(f[5]), f[6]});
    }
  }

  std::map<std::size_t, Supervision> supervision;
  auto sup_for = [&](std::size_t run) -> const Supervision& {
    auto it = supervision.find(run);
    if (it == supervision.end()) {
      it = supervision.emplace(run, build_supervision(config, data, run_seed(config, run))).first;
    }
    return it->second;
  };

  std::vector<RunResult> runs;
  for (const auto& method : config.methods) {
    if (is_learned(method)) {
      bool found = false;
      for (const auto& e : entries) {
        if (e.method != method || e.run >= config.seeds) continue;
        found = true;
        const HashModel model = load_model_file((model_dir / e.file).string());
        require(model.dim() == data.train.dim(), ErrorKind::DimensionMismatch,
                "model '" + e.file + "' has dimension " + std::to_string(model.dim()) +
                    " but the data has " + std::to_string(data.train.dim()));
        runs.push_back(evaluate_codes(config, method, model.length(), model.subspaces(),
                                      model.length() * bits_per_symbol(model.subspaces()), e.cell,
                                      data, sup_for(e.run), e.run,
                                      encode_dataset(data.train, model),
                                      encode_dataset(data.query, model), model.weights()));
      }
      require(found, ErrorKind::Io, "no trained '" + method + "' models listed in " +
                                        (model_dir / "models.csv").string());
    } else {
      for (std::size_t run = 0; run < config.seeds; ++run) {
        runs.push_back(run_method(config, method, config.hyper.L, {0, 0.0, 0.0}, data,
                                  sup_for(run), run));
      }
    }
  }
  const auto selected = select_best_cells(runs);
  write_text(out / "metrics.csv", metrics_csv(metric_rows(config, selected)));
  write_text(out / "summary.json", summary_json(config, selected));
}

void cmd_benchmark(const ExperimentConfig& config, const fs::path& out) {
  ensure_dir(out);
  const BenchmarkReport report = run_benchmark(config);
  write_text(out / "metrics.csv", metrics_csv(report.rows));
  write_text(out / "summary.json", summary_json(config, report.runs));
  write_text(out / "manifest.txt", "# rshash benchmark manifest\n" + config.to_text());

  // One table per metric: a row per code length, mean and std per method.
  for (const auto& name : metric_names(config)) {
    std::string table = "L";
    for (const auto& m : config.methods) table += "," + m + "_bits," + m + "_mean," + m + "_std";
    table += "\n";
    for (std::size_t L : config.L_list) {
      table += std::to_string(L);
      for (const auto& m : config.methods) {
        const MetricRow* mean = nullptr;
        const MetricRow* sd = nullptr;
        std::size_t bits = 0;
        for (const auto& r : report.runs) {
          if (r.method == m && r.L == L) bits = r.bits;
        }
        for (const auto& row : report.rows) {
          if (row.method != m || row.bits != bits || row.metric != name) continue;
          if (row.seed == "mean") mean = &row;
          if (row.seed == "std") sd = &row;
        }
        table += "," + std::to_string(bits) + "," + (mean ? format_double(mean->value) : "") +
                 "," + (sd ? format_double(sd->value) : "");
      }
      table += "\n";
    }
    std::string file = name;
    std::replace(file.begin(), file.end(), '@', '_');
    std::replace(file.begin(), file.end(), '=', '_');
    write_text(out / ("table_" + file + ".csv"), table);
  }
}

}  // namespace rsh
