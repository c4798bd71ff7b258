#include "jolt/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace jolt {

TrackerConfig make_tracker_config(const ScenarioSpec& spec, const EngineParams& ep,
                                  std::uint64_t seed) {
  TrackerConfig cfg;
  cfg.model = spec.model;
  cfg.num_agents = spec.num_agents;
  cfg.rx_agents = spec.rx_agents;
  cfg.tx_agents = spec.tx_agents;
  cfg.particles = ep.particles;
  cfg.prune_threshold = ep.prune_threshold;
  cfg.confirm_threshold = ep.confirm_threshold;
  cfg.selfloc_iterations = ep.selfloc_iterations;
  cfg.da_iterations = ep.da_iterations;
  cfg.seed = seed;
  cfg.run = 0;
  cfg.workers = ep.workers;
  return cfg;
}

TrackerState make_initial_state(const ScenarioTruth& truth, const EngineParams& ep,
                                std::uint64_t seed) {
  const ScenarioSpec& spec = truth.spec;
  TrackerState state;
  state.t = 0;
  state.agents.resize(spec.num_agents);
  for (int a = 1; a <= spec.num_agents; ++a) {
    RandomStream rng = substream(seed, 0, 0, Rng::kInitAgent, a);
    AgentBelief& b = state.agents[a - 1];
    b.particles.resize(4, ep.particles);
    b.weights = Eigen::VectorXd::Constant(ep.particles, 1.0 / ep.particles);
    const Eigen::Vector2d true_pos = position_of(truth.agent_states[0][a - 1]);
    for (int p = 0; p < ep.particles; ++p) {
      const Eigen::Vector2d pos = true_pos + rng.in_disc(spec.init_pos_radius);
      b.particles(0, p) = pos.x();
      b.particles(1, p) = pos.y();
      b.particles(2, p) = rng.uniform_in(-spec.init_vel_max, spec.init_vel_max);
      b.particles(3, p) = rng.uniform_in(-spec.init_vel_max, spec.init_vel_max);
    }
  }
  return state;
}

RunOutput execute_run(const ScenarioTruth& truth,
                      const std::vector<MeasurementFrame>* replay_frames, TrackMode mode,
                      std::uint64_t seed, const EngineParams& ep, const OspaConfig& ospa_cfg) {
  const ScenarioSpec& spec = truth.spec;
  const int T = spec.horizon;
  TrackerConfig cfg = make_tracker_config(spec, ep, seed);
  TrackerState state = make_initial_state(truth, ep, seed);

  RunOutput out;
  out.reports.reserve(T);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool has_truth = replay_frames == nullptr;

  for (int t = 1; t <= T; ++t) {
    const MeasurementFrame frame =
        replay_frames ? (*replay_frames)[t] : synthesize_frame(truth, t, seed, 0);
    TrackReport report = step(state, frame, mode, cfg);

    std::vector<Eigen::Vector2d> est;
    est.reserve(report.tracks.size());
    for (const auto& trk : report.tracks) est.push_back(position_of(trk.state));
    out.detected.push_back(static_cast<double>(report.tracks.size()));
    if (has_truth) {
      out.mospa.push_back(ospa(est, truth.active_target_positions(t), ospa_cfg));
    } else {
      out.mospa.push_back(nan);
    }

    std::vector<double> errs(spec.num_agents, nan);
    if (has_truth) {
      for (int a = 0; a < spec.num_agents; ++a) {
        errs[a] = position_error(position_of(report.agent_estimates[a]),
                                 position_of(truth.agent_states[t][a]));
      }
    }
    out.agent_errors.push_back(std::move(errs));
    out.reports.push_back(std::move(report));
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct TaskResult {
  TrackMode mode;
  int run = 0;
  RunOutput output;
  ScenarioTruth truth;
};

void write_run_files(const RunConfig& cfg, const ScenarioSpec& spec, const TaskResult& tr) {
  namespace fs = std::filesystem;
  const std::string mode = tr.mode == TrackMode::kJlt ? "jlt" : "slt";
  const std::string base = cfg.out_dir + "/";
  const int T = spec.horizon;

  {
    std::ofstream f(base + "agents_" + mode + "_" + std::to_string(tr.run) + ".csv");
    f << "t,agent,true_x,true_y,est_x,est_y,error\n";
    for (int t = 1; t <= T; ++t) {
      const TrackReport& rep = tr.output.reports[t - 1];
      for (int a = 1; a <= spec.num_agents; ++a) {
        const bool has_truth = !std::isnan(tr.output.agent_errors[t - 1][a - 1]);
        const Eigen::Vector2d est = position_of(rep.agent_estimates[a - 1]);
        const Eigen::Vector2d truth_pos =
            has_truth ? position_of(tr.truth.agent_states[t][a - 1])
                      : Eigen::Vector2d::Constant(std::numeric_limits<double>::quiet_NaN());
        f << t << ',' << a << ',' << fmt(truth_pos.x()) << ',' << fmt(truth_pos.y()) << ','
          << fmt(est.x()) << ',' << fmt(est.y()) << ','
          << fmt(tr.output.agent_errors[t - 1][a - 1]) << '\n';
      }
    }
  }
  {
    std::ofstream f(base + "tracks_" + mode + "_" + std::to_string(tr.run) + ".csv");
    f << "t,label,existence,est_x,est_y,est_vx,est_vy\n";
    for (int t = 1; t <= T; ++t) {
      for (const auto& trk : tr.output.reports[t - 1].tracks) {
        f << t << ",b" << trk.label.t << "_j" << trk.label.pair << "_m" << trk.label.meas
          << ',' << fmt(trk.existence) << ',' << fmt(trk.state[0]) << ',' << fmt(trk.state[1])
          << ',' << fmt(trk.state[2]) << ',' << fmt(trk.state[3]) << '\n';
      }
    }
  }
  {
    std::ofstream f(base + "metrics_" + mode + "_" + std::to_string(tr.run) + ".csv");
    f << "t,mospa,detected\n";
    for (int t = 1; t <= T; ++t) {
      f << t << ',' << fmt(tr.output.mospa[t - 1]) << ','
        << fmt(tr.output.detected[t - 1]) << '\n';
    }
  }
  (void)fs::path{};
}

}  // namespace

int run_batch(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  ScenarioSpec spec =
      cfg.scenario_path.empty() ? paper_scenario_spec() : parse_scenario_file(cfg.scenario_path);

  std::optional<std::vector<MeasurementFrame>> replay;
  if (!cfg.replay_path.empty()) {
    replay = parse_replay_file(cfg.replay_path, spec.horizon);
  }

  std::vector<TrackMode> modes;
  if (cfg.jlt) modes.push_back(TrackMode::kJlt);
  if (cfg.slt) modes.push_back(TrackMode::kSlt);
  if (modes.empty()) throw std::runtime_error("no mode selected");

  struct Task {
    TrackMode mode;
    int run;
  };
  std::vector<Task> tasks;
  for (int r = 0; r < cfg.mc_runs; ++r)
    for (TrackMode m : modes) tasks.push_back({m, r});

  const int pool = std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
  EngineParams ep = cfg.engine;
  ep.workers = std::max(1, cfg.threads / pool);

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(pool);
  for (int w = 0; w < pool; ++w) {
    threads.emplace_back([&, w]() {
      try {
        while (true) {
          const std::size_t idx = next.fetch_add(1);
          if (idx >= tasks.size()) break;
          const Task& task = tasks[idx];
          const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(task.run);
          TaskResult tr;
          tr.mode = task.mode;
          tr.run = task.run;
          tr.truth = build_scenario(spec, cfg.rebuild_truth_per_run ? seed : cfg.base_seed);
          tr.output = execute_run(tr.truth, replay ? &*replay : nullptr, task.mode, seed, ep,
                                  cfg.ospa);
          results[idx] = std::move(tr);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  for (const TaskResult& tr : results) write_run_files(cfg, spec, tr);

  // Cross-run per-time means, one block per mode.
  std::ofstream f(cfg.out_dir + "/summary.csv");
  f << "mode,t,mospa,detected";
  for (int a = 1; a <= spec.num_agents; ++a) f << ",err_agent_" << a;
  f << '\n';
  for (TrackMode m : modes) {
    std::vector<std::vector<double>> mospa_runs, detected_runs;
    std::vector<std::vector<std::vector<double>>> agent_runs;
    for (const TaskResult& tr : results) {
      if (tr.mode != m) continue;
      mospa_runs.push_back(tr.output.mospa);
      detected_runs.push_back(tr.output.detected);
      agent_runs.push_back(tr.output.agent_errors);
    }
    const auto mospa_mean = aggregate(mospa_runs);
    const auto detected_mean = aggregate(detected_runs);
    for (int t = 1; t <= spec.horizon; ++t) {
      f << (m == TrackMode::kJlt ? "jlt" : "slt") << ',' << t << ','
        << fmt(mospa_mean[t - 1]) << ',' << fmt(detected_mean[t - 1]);
      for (int a = 0; a < spec.num_agents; ++a) {
        double mean = 0.0;
        for (const auto& run : agent_runs) mean += run[t - 1][a] / agent_runs.size();
        f << ',' << fmt(mean);
      }
      f << '\n';
    }
  }
  return 0;
}

}  // namespace jolt
