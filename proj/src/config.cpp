#include "rsh/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "binary_io.hpp"

namespace rsh {

namespace {

[[noreturn]] void config_error(std::string_view key, const std::string& why) {
  fail(ErrorKind::Config, "config field '" + std::string(key) + "': " + why);
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end) config_error(key, "'" + std::string(v) + "' is not a number");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end) {
    config_error(key, "'" + std::string(v) + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error(key, "'" + std::string(v) + "' is not a boolean");
}

template <typename T, typename F>
std::vector<T> to_list(std::string_view key, std::string_view v, F convert) {
  std::vector<T> out;
  for (auto item : split_list(v)) out.push_back(static_cast<T>(convert(key, item)));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(items[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += items[i];
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  auto sz = [](std::size_t ExperimentConfig::*field) -> Setter {
    return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.*field = to_uint(k, v);
    };
  };
  auto dbl = [](double ExperimentConfig::*field) -> Setter {
    return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.*field = to_double(k, v);
    };
  };
  auto flag = [](bool ExperimentConfig::*field) -> Setter {
    return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.*field = to_bool(k, v);
    };
  };
  auto str = [](std::string ExperimentConfig::*field) -> Setter {
    return [field](ExperimentConfig& c, std::string_view, std::string_view v) { c.*field = v; };
  };
  auto sizes = [](std::vector<std::size_t> ExperimentConfig::*field) -> Setter {
    return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.*field = to_list<std::size_t>(k, v, to_uint);
    };
  };
  auto doubles = [](std::vector<double> ExperimentConfig::*field) -> Setter {
    return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.*field = to_list<double>(k, v, to_double);
    };
  };
  static const std::map<std::string, Setter, std::less<>> table = {
      {"input", str(&ExperimentConfig::input)},
      {"labels", str(&ExperimentConfig::labels)},
      {"synthetic", flag(&ExperimentConfig::synthetic)},
      {"synth_clusters", sz(&ExperimentConfig::synth_clusters)},
      {"synth_per_cluster", sz(&ExperimentConfig::synth_per_cluster)},
      {"synth_dim", sz(&ExperimentConfig::synth_dim)},
      {"synth_separation", dbl(&ExperimentConfig::synth_separation)},
      {"synth_noise", dbl(&ExperimentConfig::synth_noise)},
      {"train_count", sz(&ExperimentConfig::train_count)},
      {"query_count", sz(&ExperimentConfig::query_count)},
      {"center", flag(&ExperimentConfig::center)},
      {"normalize", flag(&ExperimentConfig::normalize)},
      {"pca_dims", sz(&ExperimentConfig::pca_dims)},
      {"groundtruth", str(&ExperimentConfig::groundtruth)},
      {"target_neighbors", dbl(&ExperimentConfig::target_neighbors)},
      {"max_pairs", sz(&ExperimentConfig::max_pairs)},
      {"pos_fraction", dbl(&ExperimentConfig::pos_fraction)},
      {"methods",
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.methods.clear();
         for (auto m : split_list(v)) c.methods.emplace_back(m);
       }},
      {"K", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.K = to_uint(k, v); }},
      {"L", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.L = to_uint(k, v); }},
      {"rho", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.rho = to_double(k, v); }},
      {"lambda", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.lambda = to_double(k, v); }},
      {"eta", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.eta = to_double(k, v); }},
      {"epochs", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.epochs = to_uint(k, v); }},
      {"tol", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.tol = to_double(k, v); }},
      {"seed", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.seed = to_uint(k, v); }},
      {"eps_min", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.hyper.eps_min = to_double(k, v); }},
      {"sweep", flag(&ExperimentConfig::sweep)},
      {"rho_grid", doubles(&ExperimentConfig::rho_grid)},
      {"lambda_grid", doubles(&ExperimentConfig::lambda_grid)},
      {"K_grid", sizes(&ExperimentConfig::K_grid)},
      {"L_list", sizes(&ExperimentConfig::L_list)},
      {"wta_K", sz(&ExperimentConfig::wta_K)},
      {"radii", sizes(&ExperimentConfig::radii)},
      {"knn", sizes(&ExperimentConfig::knn)},
      {"seeds", sz(&ExperimentConfig::seeds)},
      {"data_dir", str(&ExperimentConfig::data_dir)},
      {"model_dir", str(&ExperimentConfig::model_dir)},
  };
  return table;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, std::string_view key, const std::string& why) {
    if (!ok) config_error(key, why);
  };
  check(synthetic || !input.empty(), "input", "required unless synthetic = true");
  check(!synthetic || input.empty(), "input", "must be empty when synthetic = true");
  if (synthetic) {
    check(synth_clusters >= 1, "synth_clusters", "must be >= 1");
    check(synth_per_cluster >= 1, "synth_per_cluster", "must be >= 1");
    check(synth_dim >= 1, "synth_dim", "must be >= 1");
    check(synth_separation >= 0.0, "synth_separation", "must be >= 0");
    check(synth_noise >= 0.0, "synth_noise", "must be >= 0");
    check(train_count + query_count <= synth_clusters * synth_per_cluster, "train_count",
          "train_count + query_count exceeds the synthetic dataset size");
  }
  check(train_count >= 2, "train_count", "must be >= 2");
  check(query_count >= 1, "query_count", "must be >= 1");
  check(groundtruth == "threshold" || groundtruth == "label", "groundtruth",
        "must be 'threshold' or 'label'");
  check(groundtruth != "label" || synthetic || !labels.empty(), "labels",
        "label groundtruth needs a labels file or synthetic data");
  check(target_neighbors >= 1.0, "target_neighbors", "must be >= 1");
  check(max_pairs >= 1, "max_pairs", "must be >= 1");
  check(pos_fraction > 0.0 && pos_fraction < 1.0, "pos_fraction", "must lie in (0, 1)");
  check(!methods.empty(), "methods", "must not be empty");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    check(m == "rsh" || m == "srsh" || m == "wta" || m == "lsh", "methods",
          "unknown method '" + m + "' (expected rsh, srsh, wta, lsh)");
    check(seen.insert(m).second, "methods", "duplicate method '" + m + "'");
  }
  try {
    hyper.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("config: ") + e.what());
  }
  check(!rho_grid.empty(), "rho_grid", "must not be empty");
  check(!lambda_grid.empty(), "lambda_grid", "must not be empty");
  check(!K_grid.empty(), "K_grid", "must not be empty");
  for (double r : rho_grid) check(std::isfinite(r) && r >= 0.0, "rho_grid", "entries must be >= 0");
  for (double l : lambda_grid) check(std::isfinite(l) && l >= 0.0, "lambda_grid", "entries must be >= 0");
  for (auto k : K_grid) check(k >= 2 && k <= 65536, "K_grid", "entries must lie in [2, 65536]");
  check(!L_list.empty(), "L_list", "must not be empty");
  for (auto l : L_list) check(l >= 1, "L_list", "entries must be >= 1");
  check(wta_K >= 2, "wta_K", "must be >= 2");
  check(!radii.empty(), "radii", "must not be empty");
  check(!knn.empty(), "knn", "must not be empty");
  for (auto k : knn) check(k >= 1 && k <= train_count, "knn", "entries must lie in [1, train_count]");
  check(seeds >= 1, "seeds", "must be >= 1");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  auto kv = [&](std::string_view k, const std::string& v) { out << k << " = " << v << "\n"; };
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  kv("input", input);
  kv("labels", labels);
  kv("synthetic", b(synthetic));
  kv("synth_clusters", std::to_string(synth_clusters));
  kv("synth_per_cluster", std::to_string(synth_per_cluster));
  kv("synth_dim", std::to_string(synth_dim));
  kv("synth_separation", format_double(synth_separation));
  kv("synth_noise", format_double(synth_noise));
  kv("train_count", std::to_string(train_count));
  kv("query_count", std::to_string(query_count));
  kv("center", b(center));
  kv("normalize", b(normalize));
  kv("pca_dims", std::to_string(pca_dims));
  kv("groundtruth", groundtruth);
  kv("target_neighbors", format_double(target_neighbors));
  kv("max_pairs", std::to_string(max_pairs));
  kv("pos_fraction", format_double(pos_fraction));
  kv("methods", join(methods));
  kv("K", std::to_string(hyper.K));
  kv("L", std::to_string(hyper.L));
  kv("rho", format_double(hyper.rho));
  kv("lambda", format_double(hyper.lambda));
  kv("eta", format_double(hyper.eta));
  kv("epochs", std::to_string(hyper.epochs));
  kv("tol", format_double(hyper.tol));
  kv("seed", std::to_string(hyper.seed));
  kv("eps_min", format_double(hyper.eps_min));
  kv("sweep", b(sweep));
  kv("rho_grid", join(rho_grid));
  kv("lambda_grid", join(lambda_grid));
  kv("K_grid", join(K_grid));
  kv("L_list", join(L_list));
  kv("wta_K", std::to_string(wta_K));
  kv("radii", join(radii));
  kv("knn", join(knn));
  kv("seeds", std::to_string(seeds));
  kv("data_dir", data_dir);
  kv("model_dir", model_dir);
  return out.str();
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string, std::less<>> assigned;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) config_error(key, "unknown key (line " + std::to_string(line_no) + ")");
    if (!assigned.insert(std::string(key)).second) config_error(key, "assigned more than once");
    it->second(c, key, value);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(detail::read_file(path));
}

}  // namespace rsh
