#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "jolt/models.hpp"
#include "jolt/random.hpp"

namespace jolt {

/// Weighted particle approximation of an agent state posterior.
/// Invariant after normalize(): weights sum to 1.
struct AgentBelief {
  Eigen::Matrix4Xd particles;  // one column per particle
  Eigen::VectorXd weights;

  int count() const { return static_cast<int>(particles.cols()); }
};

/// Stable identifier of a potential target: the time step, agent pair, and
/// measurement index of its birth.
struct PTLabel {
  int t = 0;
  int pair = 0;
  int meas = 0;
  bool operator==(const PTLabel&) const = default;
};

/// Weighted particle approximation of a PT augmented state (x, r): particles
/// carry the r = 1 component, the r = 0 component collapses to a scalar mass
/// (the dummy pdf integrates out of every expectation).
/// Invariant after normalize(): sum(weights) + nonexistence = 1, and
/// sum(weights) is the existence probability.
struct PTBelief {
  Eigen::Matrix4Xd particles;
  Eigen::VectorXd weights;
  double nonexistence = 0.0;
  PTLabel label;

  int count() const { return static_cast<int>(particles.cols()); }
};

inline double existence_probability(const PTBelief& pt) { return pt.weights.sum(); }

namespace detail {
inline void check_mass(double total) {
  if (!(total > 0.0) || !std::isfinite(total)) throw std::runtime_error("degenerate belief");
}
}  // namespace detail

inline void normalize(AgentBelief& b) {
  const double total = b.weights.sum();
  detail::check_mass(total);
  b.weights /= total;
}

inline void normalize(PTBelief& b) {
  const double total = b.weights.sum() + b.nonexistence;
  detail::check_mass(total);
  b.weights /= total;
  b.nonexistence /= total;
}

inline State4 mmse_estimate(const AgentBelief& b) {
  const double total = b.weights.sum();
  detail::check_mass(total);
  return (b.particles * b.weights) / total;
}

/// MMSE under the existence-conditioned pdf (weights renormalized to sum 1).
inline State4 mmse_estimate(const PTBelief& b) {
  const double ex = b.weights.sum();
  if (!(ex > 0.0) || !std::isfinite(ex)) throw std::runtime_error("no existence support");
  return (b.particles * b.weights) / ex;
}

namespace detail {

/// Low-variance systematic resampling of columns by weight; total mass and
/// particle count are preserved. Uniform weights reproduce the input exactly.
inline Eigen::Matrix4Xd systematic_pick(const Eigen::Matrix4Xd& particles,
                                        const Eigen::VectorXd& weights, double total,
                                        RandomStream& rng) {
  const int n = static_cast<int>(particles.cols());
  Eigen::Matrix4Xd out(4, n);
  const double step = total / n;
  double u = rng.uniform() * step;
  double cum = weights[0];
  int i = 0;
  for (int k = 0; k < n; ++k) {
    while (u > cum && i + 1 < n) cum += weights[++i];
    out.col(k) = particles.col(i);
    u += step;
  }
  return out;
}

}  // namespace detail

inline void resample_systematic(AgentBelief& b, RandomStream& rng) {
  const double total = b.weights.sum();
  detail::check_mass(total);
  b.particles = detail::systematic_pick(b.particles, b.weights, total, rng);
  b.weights.setConstant(total / b.count());
}

/// Resamples the existence-conditioned particle cloud; existence probability
/// and nonexistence mass are preserved exactly.
inline void resample_systematic(PTBelief& b, RandomStream& rng) {
  const double ex = b.weights.sum();
  detail::check_mass(ex + b.nonexistence);
  if (ex <= 0.0) return;  // pure-nonexistence belief, nothing to resample
  b.particles = detail::systematic_pick(b.particles, b.weights, ex, rng);
  b.weights.setConstant(ex / b.count());
}

}  // namespace jolt
