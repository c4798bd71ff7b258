// Batch runner for the joint localization-and-tracking engine: loads a
// scenario (or the built-in simulated one) or a measurement replay, runs JLT
// and/or SLT over Monte Carlo repetitions, and writes per-step CSV outputs.

#include <cstdio>
#include <exception>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "jolt/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"jolt - joint cooperative self-localization and multitarget tracking"};

  jolt::RunConfig cfg;
  std::string mode = "jlt";
  cfg.threads = static_cast<int>(std::thread::hardware_concurrency());
  if (cfg.threads < 1) cfg.threads = 1;

  app.add_option("--config", cfg.scenario_path, "Scenario description file (default: built-in)");
  app.add_option("--replay", cfg.replay_path, "Measurement replay file");
  app.add_option("--mode", mode, "jlt | slt | both")->check(CLI::IsMember({"jlt", "slt", "both"}));
  app.add_option("--mc", cfg.mc_runs, "Monte Carlo repetitions")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.base_seed, "Base seed; run r uses seed + r");
  app.add_option("--particles", cfg.engine.particles, "Particles per belief")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--threads", cfg.threads, "Thread budget (outputs are independent of it)")
      ->check(CLI::PositiveNumber);
  app.add_option("--prune", cfg.engine.prune_threshold, "PT pruning threshold");
  app.add_option("--confirm", cfg.engine.confirm_threshold, "PT confirmation threshold");
  app.add_option("--selfloc-iters", cfg.engine.selfloc_iterations, "Self-localization sweeps");
  app.add_option("--da-iters", cfg.engine.da_iterations, "Data association sweeps");
  app.add_option("--ospa-cutoff", cfg.ospa.c, "OSPA cutoff (m)");
  app.add_option("--ospa-order", cfg.ospa.p, "OSPA order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cfg.jlt = mode == "jlt" || mode == "both";
  cfg.slt = mode == "slt" || mode == "both";
  if (cfg.engine.prune_threshold >= cfg.engine.confirm_threshold) {
    std::fprintf(stderr, "error: --prune must be below --confirm\n");
    return 1;
  }

  try {
    return jolt::run_batch(cfg);
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    // Configuration and input-file problems exit 1; anything else is 2.
    const std::string what = e.what();
    const bool config_error = what.find(".cfg") != std::string::npos ||
                              what.find("file") != std::string::npos ||
                              what.find(':') != std::string::npos;
    return config_error ? 1 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
