#pragma once

#include <cstdint>
#include <vector>

#include "jolt/association.hpp"
#include "jolt/belief.hpp"
#include "jolt/frame.hpp"
#include "jolt/models.hpp"
#include "jolt/selfloc.hpp"

namespace jolt {

/// JLT runs the full joint pipeline; SLT freezes the agent states at their
/// post-self-localization estimates before any MOT measurement is processed.
enum class TrackMode { kJlt, kSlt };

/// One entry of the fixed agent-pair enumeration (sorted by rx id, tx id).
struct PairIndex {
  int j = 0;   // 1-based position in the enumeration
  int rx = 0;  // agent ids
  int tx = 0;
  bool monostatic() const { return rx == tx; }
};

std::vector<PairIndex> enumerate_pairs(const std::vector<int>& rx_agents,
                                       const std::vector<int>& tx_agents);

struct TrackerConfig {
  ModelConfig model;
  int num_agents = 0;
  std::vector<int> rx_agents;  // R
  std::vector<int> tx_agents;  // T
  int particles = 1000;        // N_P
  double prune_threshold = 0.01;    // P_pr
  double confirm_threshold = 0.75;  // P_ex
  int selfloc_iterations = 5;       // N_SL
  int da_iterations = 50;           // N_DA
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  int workers = 1;
};

struct TrackerState {
  std::vector<AgentBelief> agents;  // indexed by agent id - 1
  std::vector<PTBelief> pts;        // legacy PTs at the current stage
  int t = 0;
};

struct ConfirmedTrack {
  PTLabel label;
  double existence = 0.0;
  State4 state;
};

struct TrackReport {
  std::vector<ConfirmedTrack> tracks;       // existence > P_ex, sorted by label
  std::vector<State4> agent_estimates;      // MMSE per agent, id - 1
};

/// Evaluated message tables for one agent pair plus the per-particle
/// likelihood caches reused by the belief-update stage.
struct PairEvaluation {
  AssociationProblem problem;
  // Row layout matches `problem.xi`: legacy PTs first, then one row per agent.
  // lam[row](m, q): pair-averaged measurement likelihood at object particle q.
  // mu[row](m, p): object-averaged measurement likelihood at pair particle p.
  // Rows for the pair's own Rx/Tx agents are left empty.
  std::vector<Eigen::MatrixXd> lam;
  std::vector<Eigen::MatrixXd> mu;
  std::vector<Eigen::Matrix4Xd> birth_particles;  // per measurement
  Eigen::MatrixXd birth_weighted;   // M x N_P: pair-averaged likelihood at birth particles
  Eigen::MatrixXd birth_at_pair;    // M x N_pair: birth-averaged likelihood at pair particles
  std::vector<double> clutter_density;  // measurement-space f_c per measurement
};

/// Survival-weighted NCV prediction of all legacy PT beliefs (mass preserving:
/// existence shrinks by p_s, the complement moves to the nonexistence mass).
void predict_pts(std::vector<PTBelief>& pts, const ModelConfig& model, double dt,
                 RandomStream& rng);

/// Computes the association tables (xi, sigma) of Eqs. feeding the DA loop for
/// one pair, drawing the per-measurement birth particle sets from `birth_rng`.
PairEvaluation evaluate_pair(const TrackerState& state,
                             const std::vector<AgentBelief>& tracking_agents,
                             const PairIndex& pair, const std::vector<RangeBearing>& mot,
                             const TrackerConfig& cfg, RandomStream& birth_rng);

/// Applies the association-weighted belief updates: legacy PT reweighting,
/// new PT creation (appended as legacy PTs for the next pair), and - in JLT
/// mode - the Rx/Tx and bystander agent reweighting.
void update_pair(TrackerState& state, std::vector<AgentBelief>& tracking_agents,
                 const PairIndex& pair, const std::vector<RangeBearing>& mot,
                 const PairEvaluation& eval, const AssociationMarginals& marginals,
                 const TrackerConfig& cfg, TrackMode mode);

/// One full time step: agent prediction, cooperative self-localization, PT
/// prediction, the sequential per-pair evaluation/association/update sweep,
/// pruning, and reporting.
TrackReport step(TrackerState& state, const MeasurementFrame& frame, TrackMode mode,
                 const TrackerConfig& cfg);

}  // namespace jolt
