#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cda/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Single-unit continuous double auction laboratory"};
  app.set_version_flag("--version", std::string(CDA_LAB_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  cda::RunOptions opts;
  std::string out;
  std::uint64_t seed = 0, runs = 0;
  int workers = 0;
  app.add_option("--config", opts.config_path, "INI run configuration")->required();
  auto* out_opt = app.add_option("--out", out, "CSV output path (default stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* runs_opt = app.add_option("--runs", runs, "Monte Carlo runs");
  auto* workers_opt = app.add_option("--workers", workers, "simulation threads");

  for (const std::string& name : cda::commands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opts.command = app.get_subcommands().front()->get_name();
  if (*out_opt) opts.out = out;
  if (*seed_opt) opts.seed = seed;
  if (*runs_opt) opts.runs = runs;
  if (*workers_opt) opts.workers = workers;

  // With --out the summary goes to stdout, otherwise stdout carries the CSV.
  std::ostream& report = opts.out ? std::cout : std::cerr;
  return cda::run(opts, std::cout, report, std::cerr);
}
