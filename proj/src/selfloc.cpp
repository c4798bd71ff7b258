#include "jolt/selfloc.hpp"

#include <stdexcept>
#include <string>

#include "jolt/parallel.hpp"

namespace jolt {

void predict_agent(AgentBelief& belief, double process_std, double dt, RandomStream& rng) {
  for (int p = 0; p < belief.count(); ++p) {
    belief.particles.col(p) = ncv_step(belief.particles.col(p), process_std, dt, rng);
  }
}

namespace {

// Scales a positive factor vector so products of many factors stay in range;
// an all-zero factor (measurement incompatible with every particle) is
// dropped, mirroring the treatment of absent observations.
void condition_factor(Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!(m > 0.0) || !std::isfinite(m)) {
    v.setOnes();
  } else {
    v /= m;
  }
}

struct LinkMessages {
  Eigen::VectorXd to_rx;
  Eigen::VectorXd to_tx;
};

}  // namespace

void selfloc_round(std::vector<AgentBelief>& beliefs, const MeasurementFrame& frame,
                   const NoiseSpec& noise, double range_scale, const SelfLocConfig& cfg) {
  const int num_agents = static_cast<int>(beliefs.size());
  const auto& links = frame.inter_agent;

  for (const auto& link : links) {
    if (link.rx < 1 || link.rx > num_agents || link.tx < 1 || link.tx > num_agents ||
        link.rx == link.tx) {
      throw std::invalid_argument("selfloc: link references unknown agent pair (" +
                                  std::to_string(link.rx) + "," + std::to_string(link.tx) + ")");
    }
  }
  for (const auto& [id, g] : frame.nav) {
    if (id < 1 || id > num_agents) throw std::invalid_argument("selfloc: nav for unknown agent");
    if (!noise.nav_pos_std.count(id))
      throw std::invalid_argument("selfloc: no nav noise configured for agent " +
                                  std::to_string(id));
  }

  // Base factor per agent: predicted weights times navigation likelihood.
  std::vector<Eigen::VectorXd> base(num_agents);
  for (int a = 0; a < num_agents; ++a) {
    const AgentBelief& b = beliefs[a];
    base[a] = b.weights;
    const auto nav_it = frame.nav.find(a + 1);
    if (nav_it != frame.nav.end()) {
      const double std_a = noise.nav_pos_std.at(a + 1);
      for (int p = 0; p < b.count(); ++p) {
        base[a][p] *= nav_likelihood(nav_it->second, b.particles.col(p), std_a);
      }
    }
    condition_factor(base[a]);
  }

  const int L = static_cast<int>(links.size());
  std::vector<int> links_of_agent_count(num_agents, 0);
  for (const auto& link : links) {
    ++links_of_agent_count[link.rx - 1];
    ++links_of_agent_count[link.tx - 1];
  }

  // Pairwise likelihood kernels are fixed across iterations.
  std::vector<Eigen::MatrixXd> kernel(L);
  for (int l = 0; l < L; ++l) {
    const AgentBelief& rx = beliefs[links[l].rx - 1];
    const AgentBelief& tx = beliefs[links[l].tx - 1];
    Eigen::MatrixXd& K = kernel[l];
    K.resize(rx.count(), tx.count());
    parallel_chunks(rx.count(), cfg.workers, [&](int, std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        for (int q = 0; q < tx.count(); ++q) {
          K(static_cast<int>(p), q) = inter_agent_likelihood(
              links[l].value, rx.particles.col(static_cast<int>(p)), tx.particles.col(q),
              noise, range_scale);
        }
      }
    });
  }

  std::vector<LinkMessages> zeta(L);
  for (int l = 0; l < L; ++l) {
    zeta[l].to_rx = Eigen::VectorXd::Ones(beliefs[links[l].rx - 1].count());
    zeta[l].to_tx = Eigen::VectorXd::Ones(beliefs[links[l].tx - 1].count());
  }

  // Extrinsic weights agent a sends toward link `skip`: base times every
  // incoming link message except the one from `skip` itself.
  auto extrinsic = [&](int agent, int skip) {
    Eigen::VectorXd w = base[agent];
    for (int l = 0; l < L; ++l) {
      if (l == skip) continue;
      if (links[l].rx - 1 == agent) w = w.cwiseProduct(zeta[l].to_rx);
      if (links[l].tx - 1 == agent) w = w.cwiseProduct(zeta[l].to_tx);
    }
    const double s = w.sum();
    if (s > 0.0 && std::isfinite(s)) w /= s;
    return w;
  };

  for (int n = 0; n < cfg.iterations; ++n) {
    std::vector<LinkMessages> next(L);
    for (int l = 0; l < L; ++l) {
      const Eigen::VectorXd from_tx = extrinsic(links[l].tx - 1, l);
      const Eigen::VectorXd from_rx = extrinsic(links[l].rx - 1, l);
      next[l].to_rx = kernel[l] * from_tx;
      next[l].to_tx = kernel[l].transpose() * from_rx;
      condition_factor(next[l].to_rx);
      condition_factor(next[l].to_tx);
    }
    zeta.swap(next);
  }

  for (int a = 0; a < num_agents; ++a) {
    Eigen::VectorXd w = extrinsic(a, -1);
    if (links_of_agent_count[a] == 0 && !frame.nav.count(a + 1)) {
      continue;  // no factors at all: belief is exactly the prediction
    }
    beliefs[a].weights = w;
    normalize(beliefs[a]);
  }
}

}  // namespace jolt
