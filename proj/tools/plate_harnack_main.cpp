#include <CLI11.hpp>

#include "plate/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "plate-harnack: solves (bilaplacian - gamma laplacian) u = f on masked "
      "grids and runs level-set, Harnack, and positivity experiment suites"};

  plate::CliOptions opts;
  app.add_option("--config", opts.config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", opts.out_dir, "output directory (overrides config)");
  app.add_flag("--strict", opts.strict,
               "exit nonzero when the run counts checker violations");
  app.add_option("--threads", opts.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  auto* seed = app.add_option("--seed", opts.seed, "suite seed (overrides config)");

  CLI11_PARSE(app, argc, argv);
  opts.seed_set = seed->count() > 0;
  return plate::run_cli(opts);
}
