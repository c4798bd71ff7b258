#include "jolt/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jolt/parallel.hpp"

namespace jolt {

std::vector<PairIndex> enumerate_pairs(const std::vector<int>& rx_agents,
                                       const std::vector<int>& tx_agents) {
  std::vector<PairIndex> pairs;
  std::vector<int> rx = rx_agents;
  std::vector<int> tx = tx_agents;
  std::sort(rx.begin(), rx.end());
  std::sort(tx.begin(), tx.end());
  for (int r : rx)
    for (int t : tx) pairs.push_back({0, r, t});
  std::sort(pairs.begin(), pairs.end(),
            [](const PairIndex& a, const PairIndex& b) {
              return a.rx != b.rx ? a.rx < b.rx : a.tx < b.tx;
            });
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].j = static_cast<int>(i) + 1;
  return pairs;
}

void predict_pts(std::vector<PTBelief>& pts, const ModelConfig& model, double dt,
                 RandomStream& rng) {
  for (auto& pt : pts) {
    const double existence = pt.weights.sum();
    for (int p = 0; p < pt.count(); ++p) {
      pt.particles.col(p) =
          ncv_step(pt.particles.col(p), model.noise.process_std_target, dt, rng);
    }
    pt.weights *= model.survival_prob;
    pt.nonexistence += (1.0 - model.survival_prob) * existence;
  }
}

namespace {

/// Index-aligned joint (Rx, Tx) particle cloud of an agent pair; the joint
/// samples turn the bistatic double integrals into single sums.
struct PairCloud {
  Eigen::VectorXd rx_x, rx_y, tx_x, tx_y;
  Eigen::VectorXd w;  // normalized joint weights
  Eigen::Vector2d rx_ref, tx_ref;  // MMSE positions, reference for f_c and guards
  bool monostatic = false;
  int count = 0;
};

PairCloud make_pair_cloud(const std::vector<AgentBelief>& agents, const PairIndex& pair) {
  const AgentBelief& rx = agents[pair.rx - 1];
  PairCloud pc;
  pc.monostatic = pair.monostatic();
  pc.count = rx.count();
  pc.rx_x = rx.particles.row(0);
  pc.rx_y = rx.particles.row(1);
  pc.rx_ref = position_of(mmse_estimate(rx));
  if (pc.monostatic) {
    pc.tx_ref = pc.rx_ref;
    pc.w = rx.weights;
  } else {
    const AgentBelief& tx = agents[pair.tx - 1];
    if (tx.count() != rx.count())
      throw std::invalid_argument("evaluate_pair: rx/tx particle counts differ");
    pc.tx_x = tx.particles.row(0);
    pc.tx_y = tx.particles.row(1);
    pc.tx_ref = position_of(mmse_estimate(tx));
    pc.w = rx.weights.cwiseProduct(tx.weights);
  }
  const double s = pc.w.sum();
  if (!(s > 0.0)) throw std::runtime_error("degenerate belief");
  pc.w /= s;
  return pc;
}

/// Accumulates, for one reflecting-object particle set against the pair cloud,
///   lam(m, q) = sum_p w_p f(z_m | obj_q, pair_p)   and, if requested,
///   mu(m, p)  = sum_q ow_q f(z_m | obj_q, pair_p).
/// Deterministic for any worker count: fixed chunking over q, mu chunk
/// partials combined in chunk order.
void object_kernel(const Eigen::VectorXd& ox, const Eigen::VectorXd& oy,
                   const Eigen::VectorXd* ow, const PairCloud& pc,
                   const std::vector<RangeBearing>& z, const RbKernel& kern,
                   double range_scale, int workers, Eigen::MatrixXd* lam,
                   Eigen::MatrixXd* mu) {
  const int nq = static_cast<int>(ox.size());
  const int np = pc.count;
  const int m_count = static_cast<int>(z.size());
  if (lam) lam->setZero(m_count, nq);
  if (mu) mu->setZero(m_count, np);
  if (m_count == 0 || nq == 0) return;

  Eigen::VectorXd zr(m_count), ux(m_count), uy(m_count);
  for (int m = 0; m < m_count; ++m) {
    zr[m] = z[m].range;
    const Eigen::Vector2d u = bearing_dir(z[m].bearing_deg);
    ux[m] = u.x();
    uy[m] = u.y();
  }
  constexpr double kRad2Deg = 180.0 / M_PI;

  std::vector<Eigen::MatrixXd> mu_partial;
  if (mu) mu_partial.assign(kParallelChunks, Eigen::MatrixXd());

  parallel_chunks(static_cast<std::size_t>(nq), workers,
                  [&](int chunk, std::size_t qb, std::size_t qe) {
    Eigen::MatrixXd* mp = nullptr;
    if (mu) {
      mu_partial[chunk].setZero(m_count, np);
      mp = &mu_partial[chunk];
    }
    for (std::size_t q = qb; q < qe; ++q) {
      const double qx = ox[static_cast<Eigen::Index>(q)];
      const double qy = oy[static_cast<Eigen::Index>(q)];
      const double wq = ow ? (*ow)[static_cast<Eigen::Index>(q)] : 0.0;
      for (int p = 0; p < np; ++p) {
        const double dx = qx - pc.rx_x[p];
        const double dy = qy - pc.rx_y[p];
        const double d1sq = dx * dx + dy * dy;
        if (d1sq == 0.0) continue;  // object on the Rx: zero likelihood
        double pred_r;
        if (pc.monostatic) {
          pred_r = range_scale * std::sqrt(d1sq);
        } else {
          const double ex = qx - pc.tx_x[p];
          const double ey = qy - pc.tx_y[p];
          pred_r = std::sqrt(d1sq) + std::sqrt(ex * ex + ey * ey);
        }
        for (int m = 0; m < m_count; ++m) {
          const double dr = zr[m] - pred_r;
          const double ar = kern.inv_two_var_r * dr * dr;
          if (ar > 40.0) continue;
          const double dot = dx * ux[m] + dy * uy[m];
          const double cross = dx * uy[m] - dy * ux[m];
          const double db = std::atan2(cross, dot) * kRad2Deg;
          const double a = ar + kern.inv_two_var_b * db * db;
          if (a > 40.0) continue;
          const double K = kern.norm * std::exp(-a);
          if (lam) (*lam)(m, static_cast<Eigen::Index>(q)) += pc.w[p] * K;
          if (mp) (*mp)(m, p) += wq * K;
        }
      }
    }
  });

  if (mu) {
    for (const auto& part : mu_partial) {
      if (part.size() > 0) *mu += part;
    }
  }
}

}  // namespace

PairEvaluation evaluate_pair(const TrackerState& state,
                             const std::vector<AgentBelief>& tracking_agents,
                             const PairIndex& pair, const std::vector<RangeBearing>& mot,
                             const TrackerConfig& cfg, RandomStream& birth_rng) {
  const ModelConfig& model = cfg.model;
  const int L = static_cast<int>(state.pts.size());
  const int A = cfg.num_agents;
  const int M = static_cast<int>(mot.size());
  const int O = L + A;
  const RbKernel kern(model.noise);

  PairEvaluation ev;
  ev.lam.resize(O);
  ev.mu.resize(O);
  ev.problem.xi.setZero(O, M + 1);
  ev.problem.sigma.resize(M, O + 1);
  if (M > 0) ev.problem.sigma.setOnes();

  const PairCloud pc = make_pair_cloud(tracking_agents, pair);
  const bool want_mu = true;  // cheap to carry; SLT simply ignores it

  ev.clutter_density.resize(M);
  for (int m = 0; m < M; ++m) {
    ev.clutter_density[m] = clutter_density_meas(mot[m], model.clutter_region, pc.rx_ref,
                                                 pc.tx_ref, model.range_scale,
                                                 pair.monostatic());
  }

  const double pd = model.detection_prob;

  // Legacy PT rows.
  for (int l = 0; l < L; ++l) {
    const PTBelief& pt = state.pts[l];
    const Eigen::VectorXd px = pt.particles.row(0);
    const Eigen::VectorXd py = pt.particles.row(1);
    object_kernel(px, py, &pt.weights, pc, mot, kern, model.range_scale, cfg.workers,
                  &ev.lam[l], want_mu ? &ev.mu[l] : nullptr);
    const double existence = pt.weights.sum();
    ev.problem.xi(l, 0) = (1.0 - pd) * existence + pt.nonexistence;
    for (int m = 0; m < M; ++m) {
      const double avg = ev.lam[l].row(m).dot(pt.weights);
      ev.problem.xi(l, m + 1) = pd * avg / (model.clutter_mean * ev.clutter_density[m]);
    }
  }

  // Agent rows; the pair's own Rx and Tx cannot generate MOT measurements.
  for (int a = 1; a <= A; ++a) {
    const int row = L + a - 1;
    if (a == pair.rx || a == pair.tx) {
      ev.problem.xi(row, 0) = 1.0;
      continue;
    }
    const AgentBelief& ab = tracking_agents[a - 1];
    const Eigen::VectorXd ax = ab.particles.row(0);
    const Eigen::VectorXd ay = ab.particles.row(1);
    Eigen::VectorXd aw = ab.weights / ab.weights.sum();
    object_kernel(ax, ay, &aw, pc, mot, kern, model.range_scale, cfg.workers,
                  &ev.lam[row], want_mu ? &ev.mu[row] : nullptr);
    ev.problem.xi(row, 0) = 1.0 - pd;
    for (int m = 0; m < M; ++m) {
      const double avg = ev.lam[row].row(m).dot(aw);
      ev.problem.xi(row, m + 1) = pd * avg / (model.clutter_mean * ev.clutter_density[m]);
    }
  }

  // Birth proposals and the measurement-oriented table. Birth particle q is
  // conditioned on pair particle q % count, sampling the agent-marginalized
  // new-PT prior.
  ev.birth_particles.resize(M);
  ev.birth_weighted.setZero(M, cfg.particles);
  ev.birth_at_pair.setZero(M, pc.count);
  for (int m = 0; m < M; ++m) {
    Eigen::Matrix4Xd& bp = ev.birth_particles[m];
    bp.resize(4, cfg.particles);
    for (int q = 0; q < cfg.particles; ++q) {
      const int p = q % pc.count;
      const Eigen::Vector2d rx_pos(pc.rx_x[p], pc.rx_y[p]);
      const Eigen::Vector2d tx_pos = pc.monostatic
                                         ? rx_pos
                                         : Eigen::Vector2d(pc.tx_x[p], pc.tx_y[p]);
      bp.col(q) = sample_birth(mot[m], rx_pos, tx_pos, model, pair.monostatic(), birth_rng);
    }
    const Eigen::VectorXd bx = bp.row(0);
    const Eigen::VectorXd by = bp.row(1);
    const Eigen::VectorXd bw =
        Eigen::VectorXd::Constant(cfg.particles, 1.0 / cfg.particles);
    Eigen::MatrixXd lam_m, mu_m;
    const std::vector<RangeBearing> zm{mot[m]};
    object_kernel(bx, by, &bw, pc, zm, kern, model.range_scale, cfg.workers, &lam_m, &mu_m);
    ev.birth_weighted.row(m) = lam_m.row(0);
    ev.birth_at_pair.row(m) = mu_m.row(0);
    const double integral = lam_m.row(0).mean();
    ev.problem.sigma(m, 0) =
        1.0 + model.birth_mean * integral / (model.clutter_mean * ev.clutter_density[m]);
  }
  return ev;
}

namespace {

/// Extrinsic association weights: the marginal tables divided entrywise by
/// the evaluation tables (0/0 -> 0). This strips each row's own evaluation
/// factor back out of the marginal, recovering the variable-to-factor
/// messages the belief updates require.
Eigen::MatrixXd extrinsic_ratio(const Eigen::MatrixXd& marginal, const Eigen::MatrixXd& table) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(marginal.rows(), marginal.cols());
  for (Eigen::Index r = 0; r < marginal.rows(); ++r)
    for (Eigen::Index c = 0; c < marginal.cols(); ++c)
      if (table(r, c) > 0.0) out(r, c) = marginal(r, c) / table(r, c);
  return out;
}

void rescale_by_max(Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (m > 0.0 && std::isfinite(m)) v /= m;
}

}  // namespace

void update_pair(TrackerState& state, std::vector<AgentBelief>& tracking_agents,
                 const PairIndex& pair, const std::vector<RangeBearing>& mot,
                 const PairEvaluation& eval, const AssociationMarginals& marginals,
                 const TrackerConfig& cfg, TrackMode mode) {
  const ModelConfig& model = cfg.model;
  const int L = static_cast<int>(state.pts.size());
  const int A = cfg.num_agents;
  const int M = static_cast<int>(mot.size());
  const double pd = model.detection_prob;

  const Eigen::MatrixXd ext_alpha = extrinsic_ratio(marginals.eta_alpha, eval.problem.xi);
  const Eigen::MatrixXd ext_beta =
      M > 0 ? extrinsic_ratio(marginals.eta_beta, eval.problem.sigma) : Eigen::MatrixXd();

  std::vector<double> meas_coeff(M);
  for (int m = 0; m < M; ++m)
    meas_coeff[m] = pd / (model.clutter_mean * eval.clutter_density[m]);

  // Agent updates first: they need the pre-update PT masses and the caches
  // evaluated at the current particle locations. Rx and Tx share the joint
  // per-index factor; every other agent is reweighted by its own h-message.
  if (mode == TrackMode::kJlt) {
    const int np = tracking_agents[pair.rx - 1].count();
    Eigen::VectorXd fac = Eigen::VectorXd::Ones(np);
    Eigen::VectorXd term(np);
    for (int l = 0; l < L; ++l) {
      const PTBelief& pt = state.pts[l];
      const double e0 = ext_alpha(l, 0);
      const double miss = e0 * ((1.0 - pd) * pt.weights.sum() + pt.nonexistence);
      term.setConstant(miss);
      for (int m = 0; m < M; ++m)
        term += ext_alpha(l, m + 1) * meas_coeff[m] * eval.mu[l].row(m).transpose();
      fac = fac.cwiseProduct(term);
      rescale_by_max(fac);
    }
    for (int m = 0; m < M; ++m) {
      const double all = ext_beta.row(m).sum();
      const double birth_coeff =
          ext_beta(m, 0) * model.birth_mean / (model.clutter_mean * eval.clutter_density[m]);
      term = Eigen::VectorXd::Constant(np, all) +
             birth_coeff * eval.birth_at_pair.row(m).transpose();
      fac = fac.cwiseProduct(term);
      rescale_by_max(fac);
    }
    for (int a = 1; a <= A; ++a) {
      if (a == pair.rx || a == pair.tx) continue;
      const int row = L + a - 1;
      const double miss = ext_alpha(row, 0) * (1.0 - pd);
      term.setConstant(miss);
      for (int m = 0; m < M; ++m)
        term += ext_alpha(row, m + 1) * meas_coeff[m] * eval.mu[row].row(m).transpose();
      fac = fac.cwiseProduct(term);
      rescale_by_max(fac);
    }

    auto apply_to_agent = [&](int agent_id) {
      AgentBelief& b = tracking_agents[agent_id - 1];
      b.weights = b.weights.cwiseProduct(fac);
      normalize(b);  // a degenerate agent belief is a hard error
      RandomStream rng =
          substream(cfg.seed, cfg.run, state.t, Rng::kResampleAgent, pair.j, agent_id);
      resample_systematic(b, rng);
    };
    apply_to_agent(pair.rx);
    if (!pair.monostatic()) apply_to_agent(pair.tx);

    // Bystander agents: own h-message evaluated at their own particles.
    for (int a = 1; a <= A; ++a) {
      if (a == pair.rx || a == pair.tx) continue;
      const int row = L + a - 1;
      AgentBelief& b = tracking_agents[a - 1];
      const double e0 = ext_alpha(row, 0);
      for (int q = 0; q < b.count(); ++q) {
        double f = e0 * (1.0 - pd);
        for (int m = 0; m < M; ++m)
          f += ext_alpha(row, m + 1) * meas_coeff[m] * eval.lam[row](m, q);
        b.weights[q] *= f;
      }
      normalize(b);
      RandomStream rng =
          substream(cfg.seed, cfg.run, state.t, Rng::kResampleAgent, pair.j, a);
      resample_systematic(b, rng);
    }
  }

  // Legacy PT updates (then resampling).
  for (int l = 0; l < L; ++l) {
    PTBelief& pt = state.pts[l];
    const double e0 = ext_alpha(l, 0);
    for (int q = 0; q < pt.count(); ++q) {
      double f = e0 * (1.0 - pd);
      for (int m = 0; m < M; ++m)
        f += ext_alpha(l, m + 1) * meas_coeff[m] * eval.lam[l](m, q);
      pt.weights[q] *= f;
    }
    pt.nonexistence *= e0;
    const double total = pt.weights.sum() + pt.nonexistence;
    if (!(total > 0.0) || !std::isfinite(total)) {
      // Demoted to pure nonexistence; pruning collects it at step end.
      pt.weights.setZero();
      pt.nonexistence = 1.0;
    } else {
      pt.weights /= total;
      pt.nonexistence /= total;
    }
    RandomStream rng = substream(cfg.seed, cfg.run, state.t, Rng::kResamplePt, pair.j, l);
    resample_systematic(pt, rng);
  }

  // New PTs: born from the birth proposals, weighted against the
  // legacy-or-clutter alternative, then appended as legacy PTs (PT mapping).
  for (int m = 0; m < M; ++m) {
    PTBelief pt;
    pt.label = {state.t, pair.j, m + 1};
    pt.particles = eval.birth_particles[m];
    const double birth_coeff = ext_beta(m, 0) * model.birth_mean /
                               (model.clutter_mean * eval.clutter_density[m] * cfg.particles);
    pt.weights = birth_coeff * eval.birth_weighted.row(m).transpose();
    pt.nonexistence = ext_beta.row(m).sum();
    const double total = pt.weights.sum() + pt.nonexistence;
    if (!(total > 0.0) || !std::isfinite(total)) {
      pt.weights.setZero();
      pt.nonexistence = 1.0;
    } else {
      pt.weights /= total;
      pt.nonexistence /= total;
    }
    RandomStream rng =
        substream(cfg.seed, cfg.run, state.t, Rng::kResampleNewPt, pair.j, m);
    resample_systematic(pt, rng);
    state.pts.push_back(std::move(pt));
  }
}

TrackReport step(TrackerState& state, const MeasurementFrame& frame, TrackMode mode,
                 const TrackerConfig& cfg) {
  const ModelConfig& model = cfg.model;
  state.t += 1;

  for (int a = 1; a <= cfg.num_agents; ++a) {
    RandomStream rng = substream(cfg.seed, cfg.run, state.t, Rng::kAgentPredict, a);
    predict_agent(state.agents[a - 1], model.noise.process_std_agent, model.dt, rng);
  }

  SelfLocConfig sl{cfg.selfloc_iterations, cfg.workers};
  selfloc_round(state.agents, frame, model.noise, model.range_scale, sl);
  for (int a = 1; a <= cfg.num_agents; ++a) {
    RandomStream rng = substream(cfg.seed, cfg.run, state.t, Rng::kResampleSelfLoc, a);
    resample_systematic(state.agents[a - 1], rng);
  }

  // SLT collapses each agent belief to its MMSE point for the tracking stage.
  std::vector<AgentBelief> collapsed;
  if (mode == TrackMode::kSlt) {
    collapsed.reserve(state.agents.size());
    for (const AgentBelief& b : state.agents) {
      AgentBelief c;
      c.particles.resize(4, 1);
      c.particles.col(0) = mmse_estimate(b);
      c.weights = Eigen::VectorXd::Ones(1);
      collapsed.push_back(std::move(c));
    }
  }
  std::vector<AgentBelief>& tracking_agents =
      mode == TrackMode::kSlt ? collapsed : state.agents;

  {
    RandomStream rng = substream(cfg.seed, cfg.run, state.t, Rng::kPtPredict);
    predict_pts(state.pts, model, model.dt, rng);
  }

  for (const PairIndex& pair : enumerate_pairs(cfg.rx_agents, cfg.tx_agents)) {
    const auto it = frame.mot.find(PairKey{pair.rx, pair.tx});
    if (it == frame.mot.end()) continue;  // pair did not sense at this step
    const std::vector<RangeBearing>& mot = it->second;
    RandomStream birth_rng = substream(cfg.seed, cfg.run, state.t, Rng::kBirth, pair.j);
    const PairEvaluation ev =
        evaluate_pair(state, tracking_agents, pair, mot, cfg, birth_rng);
    const AssociationMarginals marg = bp_associate(ev.problem, cfg.da_iterations);
    update_pair(state, tracking_agents, pair, mot, ev, marg, cfg, mode);
  }

  // Pruning, then reporting.
  std::erase_if(state.pts, [&](const PTBelief& pt) {
    return existence_probability(pt) < cfg.prune_threshold;
  });

  TrackReport report;
  for (const PTBelief& pt : state.pts) {
    const double ex = existence_probability(pt);
    if (ex > cfg.confirm_threshold) {
      report.tracks.push_back({pt.label, ex, mmse_estimate(pt)});
    }
  }
  std::sort(report.tracks.begin(), report.tracks.end(),
            [](const ConfirmedTrack& a, const ConfirmedTrack& b) {
              return std::tie(a.label.t, a.label.pair, a.label.meas) <
                     std::tie(b.label.t, b.label.pair, b.label.meas);
            });
  report.agent_estimates.reserve(state.agents.size());
  for (const AgentBelief& b : state.agents) report.agent_estimates.push_back(mmse_estimate(b));
  if (mode == TrackMode::kSlt) {
    for (std::size_t a = 0; a < collapsed.size(); ++a)
      report.agent_estimates[a] = collapsed[a].particles.col(0);
  }
  return report;
}

}  // namespace jolt
