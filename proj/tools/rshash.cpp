// rshash: preprocess, train, eval and benchmark from a config file.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rsh/config.hpp"
#include "rsh/error.hpp"
#include "rsh/experiment.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

using Command = std::function<void(const rsh::ExperimentConfig&, const std::filesystem::path&)>;

void add_command(CLI::App& app, const std::string& name, const std::string& help, Options& opts,
                 Command& selected, Command cmd) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--config", opts.config, "config file")->required();
  sub->add_option("--out", opts.out, "output directory")->required();
  sub->add_option("--seed", opts.seed, "override the config seed");
  sub->callback([&selected, cmd] { selected = cmd; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned ranking-subspace hashing"};
  app.require_subcommand(1);
  Options opts;
  Command selected;
  add_command(app, "preprocess", "split and transform the input data", opts, selected,
              rsh::cmd_preprocess);
  add_command(app, "train", "train hash models on preprocessed data", opts, selected,
              rsh::cmd_train);
  add_command(app, "eval", "evaluate trained models and baselines", opts, selected,
              rsh::cmd_eval);
  add_command(app, "benchmark", "full sweep over code lengths and seeds", opts, selected,
              rsh::cmd_benchmark);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  }

  try {
    auto config = rsh::load_config(opts.config);
    if (opts.seed) config.hyper.seed = *opts.seed;
    selected(config, opts.out);
  } catch (const rsh::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(rsh::to_string(e.kind())).c_str(), e.what());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: io_error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
