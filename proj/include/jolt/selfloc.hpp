#pragma once

#include <vector>

#include "jolt/belief.hpp"
#include "jolt/frame.hpp"
#include "jolt/models.hpp"

namespace jolt {

struct SelfLocConfig {
  int iterations = 5;  // N_SL
  int workers = 1;     // kernel thread budget; output is independent of it
};

/// Pushes every particle through the agent NCV model with fresh process
/// noise; weights are unchanged.
void predict_agent(AgentBelief& belief, double process_std, double dt, RandomStream& rng);

/// Iterative cooperative self-localization: runs cfg.iterations rounds of
/// nonparametric message passing over the inter-agent links in `frame`, then
/// fuses prediction x navigation x link messages per agent and normalizes.
/// `beliefs` is indexed by agent id - 1 and updated in place. No resampling.
///
/// With no navigation data and no links this is the identity.
void selfloc_round(std::vector<AgentBelief>& beliefs, const MeasurementFrame& frame,
                   const NoiseSpec& noise, double range_scale, const SelfLocConfig& cfg);

}  // namespace jolt
