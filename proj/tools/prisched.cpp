// Command-line front end: prisched <command> --config <file> [--out dir] [--seed n] [--quiet]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "prisched/commands.hpp"
#include "prisched/scenario.hpp"

int main(int argc, char** argv) {
  using namespace prisched;
  CLI::App app{"Prioritized maximal scheduling: analysis, synthesis and simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config, "Scenario config file")->required();
  app.add_option("--out", out_dir, "Output directory (overrides [out] dir)");
  app.add_option("--seed", seed, "Master seed (overrides [sim] seed)");
  app.add_flag("--quiet", quiet, "Suppress progress messages");

  std::string goal = "stability";
  auto* analyze = app.add_subcommand("analyze", "Report interference degrees, delta and region membership");
  auto* synth = app.add_subcommand("synth", "Synthesize a priority or a decomposition");
  synth->add_option("--goal", goal, "stability | delay | randomized")
      ->check(CLI::IsMember({"stability", "delay", "randomized"}));
  auto* simulate = app.add_subcommand("simulate", "Run the slotted queueing simulation");
  auto* exponent = app.add_subcommand("delay-exponent", "Compute per-link delay exponents");
  auto* decompose = app.add_subcommand("decompose", "Decompose the rates into maximal sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::error;
  }

  try {
    const Scenario sc = load_scenario(config, seed);
    CommandOptions opts;
    opts.out_dir = out_dir;
    opts.quiet = quiet;
    opts.goal = goal;
    if (analyze->parsed()) return cmd_analyze(sc, opts, std::cout, std::cerr);
    if (synth->parsed()) return cmd_synth(sc, opts, std::cout, std::cerr);
    if (simulate->parsed()) return cmd_simulate(sc, opts, std::cout, std::cerr);
    if (exponent->parsed()) return cmd_delay_exponent(sc, opts, std::cout, std::cerr);
    if (decompose->parsed()) return cmd_decompose(sc, opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::error;
  }
  return exit_code::error;
}
