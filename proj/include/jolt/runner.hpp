#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jolt/metrics.hpp"
#include "jolt/scenario.hpp"
#include "jolt/tracker.hpp"

namespace jolt {

/// Engine knobs shared by every run of a batch.
struct EngineParams {
  int particles = 1000;
  double prune_threshold = 0.01;
  double confirm_threshold = 0.75;
  int selfloc_iterations = 5;
  int da_iterations = 50;
  int workers = 1;
};

/// One tracker execution over the full horizon; vectors are indexed t - 1.
struct RunOutput {
  std::vector<TrackReport> reports;
  std::vector<double> mospa;
  std::vector<double> detected;
  std::vector<std::vector<double>> agent_errors;  // [t-1][agent-1], NaN without truth
};

TrackerConfig make_tracker_config(const ScenarioSpec& spec, const EngineParams& ep,
                                  std::uint64_t seed);

/// Initial agent beliefs drawn from the configured prior around the t = 0
/// truth states (uniform disc position, uniform velocity box).
TrackerState make_initial_state(const ScenarioTruth& truth, const EngineParams& ep,
                                std::uint64_t seed);

/// Runs one mode over the horizon. Frames are synthesized from the truth and
/// seed unless an explicit replay sequence is supplied.
RunOutput execute_run(const ScenarioTruth& truth,
                      const std::vector<MeasurementFrame>* replay_frames, TrackMode mode,
                      std::uint64_t seed, const EngineParams& ep, const OspaConfig& ospa_cfg);

/// Batch configuration mirroring the CLI surface.
struct RunConfig {
  std::string scenario_path;  // empty -> built-in paper scenario
  std::string replay_path;    // optional, requires a scenario/config for the setup
  bool jlt = true;
  bool slt = false;
  int mc_runs = 1;
  std::uint64_t base_seed = 1;
  EngineParams engine;
  OspaConfig ospa{1.0, 5000.0};
  std::string out_dir = ".";
  int threads = 1;
  bool rebuild_truth_per_run = true;  // fresh target draws per run (simulated mode)
};

/// Runs the batch, writing per-run CSVs (agents_/tracks_/metrics_) and the
/// cross-run summary.csv. Returns 0 on success. Byte-identical outputs for a
/// fixed config and seed, regardless of thread count.
int run_batch(const RunConfig& cfg);

}  // namespace jolt
