#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mimoq/config.hpp"
#include "mimoq/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void print_report(const mimoq::RunReport& report) {
  for (const std::string& path : report.outputs)
    std::printf("wrote %s\n", path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-constrained MIMO spectral-efficiency bounds"};
  app.require_subcommand(1);

  std::string config_path, cache_dir, out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--cache-dir", cache_dir, "operator matrix cache directory");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed override")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads, "worker thread budget");

  CLI::App* cmd_run = app.add_subcommand("run", "run a config-driven experiment");
  std::string figure_id;
  CLI::App* cmd_repro =
      app.add_subcommand("reproduce", "rerun a bundled figure study");
  cmd_repro->add_option("figure-id", figure_id, "fig3..fig11")->required();
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "primal-vs-dual gap certificate");

  CLI11_PARSE(app, argc, argv);

  mimoq::RunOptions opt;
  opt.out_dir = out_dir;
  opt.cache_dir = cache_dir;
  opt.threads = threads;
  if (seed_set) opt.seed = seed;

  try {
    if (cmd_run->parsed()) {
      if (config_path.empty()) {
        std::fprintf(stderr, "error: run requires --config <path>\n");
        return kExitConfig;
      }
      const mimoq::Config cfg = mimoq::Config::parse_file(config_path);
      print_report(mimoq::run_experiment(cfg, opt));
    } else if (cmd_repro->parsed()) {
      print_report(mimoq::reproduce_figure(figure_id, opt));
    } else if (cmd_verify->parsed()) {
      print_report(mimoq::run_verify(opt));
    }
  } catch (const mimoq::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
