#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jolt/frame.hpp"
#include "jolt/models.hpp"

namespace jolt {

/// Deterministic agent trajectory descriptions.
struct CircleTrajectory {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 0.0;
  double speed = 0.0;      // m/s along the circle, positive = counterclockwise
  double phase_deg = 0.0;  // polar angle at t = 0
};

struct LinearTrajectory {
  Eigen::Vector2d start{0.0, 0.0};
  Eigen::Vector2d velocity{0.0, 0.0};
};

struct AgentTrajectory {
  enum class Kind { kFixed, kCircle, kLinear } kind = Kind::kFixed;
  CircleTrajectory circle;
  LinearTrajectory linear;  // kFixed uses linear.start with zero velocity
};

struct TargetSpec {
  int first_step = 1;
  int last_step = 1;
  bool has_explicit_state = false;
  State4 state0;  // state at first_step when explicit
};

struct OutageWindow {
  int rx = 0;
  int tx = 0;
  int first_step = 0;
  int last_step = -1;
};

/// Everything needed to generate ground truth and synthesize measurements.
struct ScenarioSpec {
  int horizon = 50;
  ModelConfig model;
  int num_agents = 0;
  std::vector<int> rx_agents;
  std::vector<int> tx_agents;
  std::vector<AgentTrajectory> trajectories;  // per agent, id - 1
  std::vector<TargetSpec> targets;
  std::vector<OutageWindow> outages;
  double init_pos_radius = 150.0;  // agent prior: uniform disc around truth
  double init_vel_max = 2.57;      // agent prior: velocity box half-width
  Rect spawn_region{-3000.0, 3000.0, -3000.0, 3000.0};  // seeded target spawns
};

/// Ground-truth trajectories: agent states for t = 0..horizon and target
/// states over their activity windows.
struct ScenarioTruth {
  ScenarioSpec spec;
  std::vector<std::vector<State4>> agent_states;   // [t][agent]
  std::vector<std::vector<State4>> target_states;  // [t][target]; inactive = NaN
  std::vector<std::vector<bool>> target_active;    // [t][target]

  std::vector<Eigen::Vector2d> active_target_positions(int t) const;
};

/// The simulated experiment: four agents (three on a 3.5 km circle at
/// 0.69 m/s, one anchored transmitter at the origin), four targets with
/// staggered activity windows, navigation on agents 3 and 4, and an
/// inter-agent outage on agents 1-2 for t in [10, 40].
ScenarioSpec paper_scenario_spec();

/// Builds truth from a spec; seeded draws cover target spawn states only.
ScenarioTruth build_scenario(const ScenarioSpec& spec, std::uint64_t seed);

inline ScenarioTruth build_paper_scenario(std::uint64_t seed) {
  return build_scenario(paper_scenario_spec(), seed);
}

/// Synthesizes the observations of one time step: navigation data, inter-agent
/// range-bearing links (minus outages), and per-pair MOT measurements with
/// Bernoulli detections, Poisson clutter, and randomized list order.
MeasurementFrame synthesize_frame(const ScenarioTruth& truth, int t, std::uint64_t seed,
                                  std::uint64_t run);

/// Parses the key-value scenario description format (see README).
/// Throws std::runtime_error with a line number on malformed input.
ScenarioSpec parse_scenario_file(const std::string& path);

/// Parses a measurement replay file: one record per line,
///   t NAV agent gx gy
///   t LINK rx tx range bearing
///   t MOT rx tx range bearing        (repeated per measurement)
///   t MOT rx tx -                    (pair sensed, zero measurements)
/// Returns frames indexed by t = 1..horizon.
std::vector<MeasurementFrame> parse_replay_file(const std::string& path, int horizon);

}  // namespace jolt
