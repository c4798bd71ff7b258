#include "jolt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jolt/random.hpp"
#include "jolt/tracker.hpp"

namespace jolt {

namespace {

State4 agent_truth_at(const AgentTrajectory& traj, int t, double dt) {
  State4 s;
  switch (traj.kind) {
    case AgentTrajectory::Kind::kFixed:
      s << traj.linear.start.x(), traj.linear.start.y(), 0.0, 0.0;
      return s;
    case AgentTrajectory::Kind::kLinear:
      s.head<2>() = traj.linear.start + t * dt * traj.linear.velocity;
      s.tail<2>() = traj.linear.velocity;
      return s;
    case AgentTrajectory::Kind::kCircle: {
      const CircleTrajectory& c = traj.circle;
      const double omega = c.radius > 0.0 ? c.speed / c.radius : 0.0;
      const double th = c.phase_deg * M_PI / 180.0 + omega * t * dt;
      s << c.center.x() + c.radius * std::cos(th), c.center.y() + c.radius * std::sin(th),
          -c.speed * std::sin(th), c.speed * std::cos(th);
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<Eigen::Vector2d> ScenarioTruth::active_target_positions(int t) const {
  std::vector<Eigen::Vector2d> out;
  for (std::size_t k = 0; k < target_active[t].size(); ++k) {
    if (target_active[t][k]) out.push_back(position_of(target_states[t][k]));
  }
  return out;
}

ScenarioSpec paper_scenario_spec() {
  ScenarioSpec spec;
  spec.horizon = 50;
  spec.model = ModelConfig{};
  spec.model.noise.nav_pos_std = {{3, 20.0}, {4, 5.0}};
  spec.num_agents = 4;
  spec.rx_agents = {1, 2, 3};
  spec.tx_agents = {4};
  spec.trajectories.resize(4);
  for (int a = 0; a < 3; ++a) {
    spec.trajectories[a].kind = AgentTrajectory::Kind::kCircle;
    spec.trajectories[a].circle = {{0.0, 0.0}, 3500.0, 0.69, 90.0 + 120.0 * a};
  }
  spec.trajectories[3].kind = AgentTrajectory::Kind::kFixed;
  spec.trajectories[3].linear.start = {0.0, 0.0};
  spec.targets = {{5, 35, false, {}}, {10, 40, false, {}}, {20, 40, false, {}},
                  {30, 45, false, {}}};
  spec.outages = {{1, 4, 10, 40}, {2, 4, 10, 40}};
  return spec;
}

ScenarioTruth build_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  ScenarioTruth truth;
  truth.spec = spec;
  const int T = spec.horizon;
  const int A = spec.num_agents;
  const int K = static_cast<int>(spec.targets.size());
  truth.agent_states.assign(T + 1, std::vector<State4>(A));
  truth.target_states.assign(
      T + 1, std::vector<State4>(K, State4::Constant(std::numeric_limits<double>::quiet_NaN())));
  truth.target_active.assign(T + 1, std::vector<bool>(K, false));

  for (int t = 0; t <= T; ++t)
    for (int a = 0; a < A; ++a)
      truth.agent_states[t][a] = agent_truth_at(spec.trajectories[a], t, spec.model.dt);

  for (int k = 0; k < K; ++k) {
    const TargetSpec& tg = spec.targets[k];
    State4 s0;
    if (tg.has_explicit_state) {
      s0 = tg.state0;
    } else {
      RandomStream rng = substream(seed, 0, 0, Rng::kTruthTargets, k);
      s0 << rng.uniform_in(spec.spawn_region.xmin, spec.spawn_region.xmax),
          rng.uniform_in(spec.spawn_region.ymin, spec.spawn_region.ymax),
          rng.uniform_in(-spec.model.birth_vel_max, spec.model.birth_vel_max),
          rng.uniform_in(-spec.model.birth_vel_max, spec.model.birth_vel_max);
    }
    for (int t = std::max(1, tg.first_step); t <= std::min(T, tg.last_step); ++t) {
      State4 s = s0;
      s.head<2>() += (t - tg.first_step) * spec.model.dt * s0.tail<2>();
      truth.target_states[t][k] = s;
      truth.target_active[t][k] = true;
    }
  }
  return truth;
}

MeasurementFrame synthesize_frame(const ScenarioTruth& truth, int t, std::uint64_t seed,
                                  std::uint64_t run) {
  const ScenarioSpec& spec = truth.spec;
  const ModelConfig& model = spec.model;
  if (t < 1 || t > spec.horizon) throw std::invalid_argument("synthesize_frame: t out of range");
  MeasurementFrame frame;

  // Navigation data for equipped agents.
  {
    RandomStream rng = substream(seed, run, t, Rng::kNav);
    for (const auto& [id, std_a] : model.noise.nav_pos_std) {
      const Eigen::Vector2d pos = position_of(truth.agent_states[t][id - 1]);
      frame.nav[id] = pos + std_a * Eigen::Vector2d(rng.normal(), rng.normal());
    }
  }

  auto in_outage = [&](int rx, int tx) {
    for (const OutageWindow& o : spec.outages) {
      if (o.rx == rx && o.tx == tx && t >= o.first_step && t <= o.last_step) return true;
    }
    return false;
  };

  // Inter-agent links on all Rx/Tx combinations, minus outages.
  {
    RandomStream rng = substream(seed, run, t, Rng::kLinks);
    for (int rx : spec.rx_agents) {
      for (int tx : spec.tx_agents) {
        if (rx == tx || in_outage(rx, tx)) continue;
        const Eigen::Vector2d p_rx = position_of(truth.agent_states[t][rx - 1]);
        const Eigen::Vector2d p_tx = position_of(truth.agent_states[t][tx - 1]);
        RangeBearing rb = predict_mono(p_rx, p_tx, model.range_scale);
        rb.range += model.noise.range_std * rng.normal();
        rb.bearing_deg = wrap_deg_360(rb.bearing_deg + model.noise.bearing_std * rng.normal());
        frame.inter_agent.push_back({rx, tx, rb});
      }
    }
  }

  // Per-pair MOT measurements: detections of active targets and bystander
  // agents, plus Cartesian-uniform clutter, in randomized order.
  for (const PairIndex& pair : enumerate_pairs(spec.rx_agents, spec.tx_agents)) {
    RandomStream rng = substream(seed, run, t, Rng::kMot, pair.j);
    const Eigen::Vector2d p_rx = position_of(truth.agent_states[t][pair.rx - 1]);
    const Eigen::Vector2d p_tx = position_of(truth.agent_states[t][pair.tx - 1]);
    std::vector<RangeBearing> z;

    auto detect = [&](const Eigen::Vector2d& obj) {
      if (rng.uniform() >= model.detection_prob) return;
      RangeBearing rb = pair.monostatic() ? predict_mono(p_rx, obj, model.range_scale)
                                          : predict_bistatic(p_rx, p_tx, obj);
      rb.range += model.noise.range_std * rng.normal();
      rb.bearing_deg = wrap_deg_360(rb.bearing_deg + model.noise.bearing_std * rng.normal());
      z.push_back(rb);
    };

    for (std::size_t k = 0; k < truth.target_active[t].size(); ++k) {
      if (truth.target_active[t][k]) detect(position_of(truth.target_states[t][k]));
    }
    for (int a = 1; a <= spec.num_agents; ++a) {
      if (a == pair.rx || a == pair.tx) continue;
      detect(position_of(truth.agent_states[t][a - 1]));
    }

    {
      RandomStream crng = substream(seed, run, t, Rng::kClutter, pair.j);
      const int n_clutter = crng.poisson(model.clutter_mean);
      for (int c = 0; c < n_clutter; ++c) {
        const Eigen::Vector2d p(
            crng.uniform_in(model.clutter_region.xmin, model.clutter_region.xmax),
            crng.uniform_in(model.clutter_region.ymin, model.clutter_region.ymax));
        z.push_back(pair.monostatic() ? predict_mono(p_rx, p, model.range_scale)
                                      : predict_bistatic(p_rx, p_tx, p));
      }
    }

    RandomStream srng = substream(seed, run, t, Rng::kShuffle, pair.j);
    srng.shuffle(z);
    frame.mot[PairKey{pair.rx, pair.tx}] = std::move(z);
  }
  return frame;
}

// ---------------------------------------------------------------------------
// Scenario description file parsing.

namespace {

struct Parser {
  std::string path;
  int lineno = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
  }

  std::vector<double> numbers(const std::string& s, std::size_t expect) const {
    std::istringstream iss(s);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    if (expect != 0 && out.size() != expect)
      fail("expected " + std::to_string(expect) + " numeric values, got '" + s + "'");
    return out;
  }

  std::vector<int> ints(const std::string& s) const {
    std::istringstream iss(s);
    std::vector<int> out;
    int v;
    while (iss >> v) out.push_back(v);
    if (out.empty()) fail("expected integer list, got '" + s + "'");
    return out;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ScenarioSpec parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open scenario file");
  ScenarioSpec spec;
  spec.targets.clear();
  Parser p{path, 0};
  std::string section;
  int section_index = 0;  // agent/target id of the current section
  std::string line;

  auto require_agents = [&]() {
    if (spec.num_agents == 0) p.fail("[agents] count must come before per-agent sections");
  };

  while (std::getline(in, line)) {
    ++p.lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      std::istringstream iss(line.substr(1, line.size() - 2));
      iss >> section;
      section_index = 0;
      iss >> section_index;
      if (section == "agent") {
        require_agents();
        if (section_index < 1 || section_index > spec.num_agents) p.fail("agent id out of range");
      } else if (section == "target") {
        if (section_index < 1) p.fail("target id must be positive");
        if (static_cast<int>(spec.targets.size()) < section_index)
          spec.targets.resize(section_index);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    ModelConfig& model = spec.model;

    if (section == "run") {
      if (key == "horizon") spec.horizon = static_cast<int>(p.numbers(val, 1)[0]);
      else if (key == "dt") model.dt = p.numbers(val, 1)[0];
      else p.fail("unknown key '" + key + "' in [run]");
    } else if (section == "model") {
      if (key == "range_std") model.noise.range_std = p.numbers(val, 1)[0];
      else if (key == "bearing_std") model.noise.bearing_std = p.numbers(val, 1)[0];
      else if (key == "process_std_agent") model.noise.process_std_agent = p.numbers(val, 1)[0];
      else if (key == "process_std_target") model.noise.process_std_target = p.numbers(val, 1)[0];
      else if (key == "detection_prob") model.detection_prob = p.numbers(val, 1)[0];
      else if (key == "clutter_mean") model.clutter_mean = p.numbers(val, 1)[0];
      else if (key == "clutter_region") {
        const auto v = p.numbers(val, 4);
        model.clutter_region = {v[0], v[1], v[2], v[3]};
      } else if (key == "birth_mean") model.birth_mean = p.numbers(val, 1)[0];
      else if (key == "birth_pos_std") model.birth_pos_std = p.numbers(val, 1)[0];
      else if (key == "birth_vel_max") model.birth_vel_max = p.numbers(val, 1)[0];
      else if (key == "survival_prob") model.survival_prob = p.numbers(val, 1)[0];
      else if (key == "range_scale") model.range_scale = p.numbers(val, 1)[0];
      else p.fail("unknown key '" + key + "' in [model]");
    } else if (section == "agents") {
      if (key == "count") {
        spec.num_agents = static_cast<int>(p.numbers(val, 1)[0]);
        spec.trajectories.assign(spec.num_agents, AgentTrajectory{});
      } else if (key == "rx") spec.rx_agents = p.ints(val);
      else if (key == "tx") spec.tx_agents = p.ints(val);
      else p.fail("unknown key '" + key + "' in [agents]");
    } else if (section == "agent") {
      AgentTrajectory& traj = spec.trajectories[section_index - 1];
      if (key == "trajectory") {
        std::istringstream iss(val);
        std::string kind;
        iss >> kind;
        const std::string rest(std::istreambuf_iterator<char>(iss), {});
        if (kind == "fixed") {
          const auto v = p.numbers(rest, 2);
          traj.kind = AgentTrajectory::Kind::kFixed;
          traj.linear.start = {v[0], v[1]};
        } else if (kind == "linear") {
          const auto v = p.numbers(rest, 4);
          traj.kind = AgentTrajectory::Kind::kLinear;
          traj.linear = {{v[0], v[1]}, {v[2], v[3]}};
        } else if (kind == "circle") {
          const auto v = p.numbers(rest, 5);
          traj.kind = AgentTrajectory::Kind::kCircle;
          traj.circle = {{v[0], v[1]}, v[2], v[3], v[4]};
        } else p.fail("unknown trajectory kind '" + kind + "'");
      } else if (key == "nav_std") {
        model.noise.nav_pos_std[section_index] = p.numbers(val, 1)[0];
      } else p.fail("unknown key '" + key + "' in [agent]");
    } else if (section == "target") {
      TargetSpec& tg = spec.targets[section_index - 1];
      if (key == "window") {
        const auto v = p.numbers(val, 2);
        tg.first_step = static_cast<int>(v[0]);
        tg.last_step = static_cast<int>(v[1]);
      } else if (key == "spawn") {
        const auto v = p.numbers(val, 4);
        tg.has_explicit_state = true;
        tg.state0 << v[0], v[1], v[2], v[3];
      } else p.fail("unknown key '" + key + "' in [target]");
    } else if (section == "init") {
      if (key == "pos_radius") spec.init_pos_radius = p.numbers(val, 1)[0];
      else if (key == "vel_max") spec.init_vel_max = p.numbers(val, 1)[0];
      else p.fail("unknown key '" + key + "' in [init]");
    } else if (section == "spawn_region") {
      if (key == "rect") {
        const auto v = p.numbers(val, 4);
        spec.spawn_region = {v[0], v[1], v[2], v[3]};
      } else p.fail("unknown key '" + key + "' in [spawn_region]");
    } else if (section == "outage") {
      if (key == "link") {
        const auto v = p.numbers(val, 4);
        spec.outages.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]),
                                static_cast<int>(v[2]), static_cast<int>(v[3])});
      } else p.fail("unknown key '" + key + "' in [outage]");
    } else {
      p.fail("unknown section '" + section + "'");
    }
  }

  if (spec.num_agents == 0) throw std::runtime_error(path + ": missing [agents] count");
  if (spec.rx_agents.empty() || spec.tx_agents.empty())
    throw std::runtime_error(path + ": rx and tx agent sets are required");
  for (const TargetSpec& tg : spec.targets) {
    if (tg.first_step < 1 || tg.last_step > spec.horizon || tg.first_step > tg.last_step)
      throw std::runtime_error(path + ": target window outside [1, horizon]");
  }
  return spec;
}

std::vector<MeasurementFrame> parse_replay_file(const std::string& path, int horizon) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open replay file");
  std::vector<MeasurementFrame> frames(horizon + 1);
  Parser p{path, 0};
  std::string line;
  while (std::getline(in, line)) {
    ++p.lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream iss(line);
    int t;
    std::string type;
    if (!(iss >> t >> type)) p.fail("expected 't TYPE ...'");
    if (t < 1 || t > horizon) p.fail("time step out of [1, horizon]");
    if (type == "NAV") {
      int agent;
      double gx, gy;
      if (!(iss >> agent >> gx >> gy)) p.fail("NAV needs: agent gx gy");
      frames[t].nav[agent] = {gx, gy};
    } else if (type == "LINK") {
      int rx, tx;
      double r, b;
      if (!(iss >> rx >> tx >> r >> b)) p.fail("LINK needs: rx tx range bearing");
      frames[t].inter_agent.push_back({rx, tx, {r, wrap_deg_360(b)}});
    } else if (type == "MOT") {
      int rx, tx;
      std::string first;
      if (!(iss >> rx >> tx >> first)) p.fail("MOT needs: rx tx (range bearing | -)");
      auto& list = frames[t].mot[PairKey{rx, tx}];
      if (first != "-") {
        double r, b;
        try {
          r = std::stod(first);
        } catch (const std::exception&) {
          p.fail("MOT range must be numeric or '-'");
        }
        if (!(iss >> b)) p.fail("MOT needs a bearing value");
        list.push_back({r, wrap_deg_360(b)});
      }
    } else {
      p.fail("unknown record type '" + type + "'");
    }
  }
  return frames;
}

}  // namespace jolt
