#pragma once

#include <map>
#include <stdexcept>

#include <Eigen/Dense>

#include "jolt/geometry.hpp"
#include "jolt/random.hpp"

namespace jolt {

/// 4D kinematic state [x, y, vx, vy]; shared by agents and targets.
using State4 = Eigen::Vector4d;

inline Eigen::Vector2d position_of(const State4& s) { return s.head<2>(); }
inline Eigen::Vector2d velocity_of(const State4& s) { return s.tail<2>(); }

/// Axis-aligned rectangle in meters.
struct Rect {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  double area() const { return (xmax - xmin) * (ymax - ymin); }
  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
};

struct NoiseSpec {
  double range_std = 20.0;    // m, shared by inter-agent and MOT measurements
  double bearing_std = 1.0;   // deg
  std::map<int, double> nav_pos_std;  // m, keyed by agent id; presence = nav-equipped
  double process_std_agent = 0.1;     // m/s^2
  double process_std_target = 0.1;    // m/s^2
};

struct ModelConfig {
  double dt = 30.0;              // s
  double detection_prob = 0.7;
  double clutter_mean = 3.0;     // Poisson mean per agent pair
  Rect clutter_region{-5000.0, 5000.0, -5000.0, 5000.0};
  double birth_mean = 0.1;       // Poisson mean of new PTs per agent pair
  double birth_pos_std = 500.0;  // m
  double birth_vel_max = 1.54;   // m/s, velocity uniform on [-max, max]^2
  double survival_prob = 0.99;
  double range_scale = 2.0;      // factor on one-way range (inter-agent, monostatic)
  NoiseSpec noise;
};

/// Role of the queried object relative to the agent pair under evaluation.
enum class PairRole { kObject, kOwnRx, kOwnTx };

inline double gauss_pdf(double x, double mean, double std) {
  const double z = (x - mean) / std;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * M_PI) * std);
}

/// Nearly-constant-velocity transition with white acceleration noise:
/// s' = A s + W u, u ~ N(0, std^2 I2), A = [[I, dt I], [0, I]],
/// W = [[dt^2/2 I], [dt I]].
inline State4 ncv_step(const State4& s, double process_std, double dt, RandomStream& rng) {
  if (dt <= 0.0) throw std::invalid_argument("ncv_step: dt must be positive");
  const double ax = process_std > 0.0 ? process_std * rng.normal() : 0.0;
  const double ay = process_std > 0.0 ? process_std * rng.normal() : 0.0;
  State4 out;
  out[0] = s[0] + dt * s[2] + 0.5 * dt * dt * ax;
  out[1] = s[1] + dt * s[3] + 0.5 * dt * dt * ay;
  out[2] = s[2] + dt * ax;
  out[3] = s[3] + dt * ay;
  return out;
}

/// Isotropic Gaussian likelihood of navigation data g given the agent state.
inline double nav_likelihood(const Eigen::Vector2d& g, const State4& s, double nav_pos_std) {
  if (nav_pos_std <= 0.0) throw std::invalid_argument("nav_likelihood: std must be positive");
  return gauss_pdf(g.x(), s[0], nav_pos_std) * gauss_pdf(g.y(), s[1], nav_pos_std);
}

/// Gaussian range times wrapped-Gaussian bearing density of an inter-agent
/// measurement; predicted range is range_scale * |rx - tx|, bearing Rx -> Tx.
inline double inter_agent_likelihood(const RangeBearing& rho, const State4& rx,
                                     const State4& tx, const NoiseSpec& noise,
                                     double range_scale) {
  const RangeBearing pred = predict_mono(position_of(rx), position_of(tx), range_scale);
  const double db = angle_diff_deg(rho.bearing_deg, pred.bearing_deg);
  return gauss_pdf(rho.range, pred.range, noise.range_std) *
         gauss_pdf(db, 0.0, noise.bearing_std);
}

/// MOT measurement likelihood for a reflecting object at object_pos.
/// Monostatic range is range_scale * one-way distance; bistatic range is the
/// sum of the two one-way distances. Bearing is always taken at the Rx.
/// Returns 0 for a degenerate geometry (object at the Rx position).
inline double mot_likelihood(const RangeBearing& z, const Eigen::Vector2d& object_pos,
                             const State4& rx, const State4& tx, const NoiseSpec& noise,
                             double range_scale, bool monostatic) {
  const Eigen::Vector2d d = object_pos - position_of(rx);
  if (d.x() == 0.0 && d.y() == 0.0) return 0.0;
  const double d1 = d.norm();
  const double pred_range =
      monostatic ? range_scale * d1 : d1 + (object_pos - position_of(tx)).norm();
  const double pred_bearing = wrap_deg_360(std::atan2(d.x(), d.y()) * 180.0 / M_PI);
  const double db = angle_diff_deg(z.bearing_deg, pred_bearing);
  return gauss_pdf(z.range, pred_range, noise.range_std) *
         gauss_pdf(db, 0.0, noise.bearing_std);
}

/// Constant detection probability, forced to zero for the pair's own agents.
inline double detection_probability(const ModelConfig& cfg, PairRole role) {
  return role == PairRole::kObject ? cfg.detection_prob : 0.0;
}

/// Clutter density: uniform over the Cartesian surveillance rectangle,
/// evaluated by inverting z to its Cartesian point. Zero outside the region.
inline double clutter_pdf(const RangeBearing& z, const Rect& region,
                          const Eigen::Vector2d& rx, const Eigen::Vector2d& tx,
                          double range_scale, bool monostatic) {
  if (region.area() <= 0.0) throw std::invalid_argument("clutter_pdf: empty region");
  const Eigen::Vector2d p = mot_to_cartesian(z, rx, tx, range_scale, monostatic);
  return region.contains(p) ? 1.0 / region.area() : 0.0;
}

/// Clutter density expressed in range-bearing measurement space: the Cartesian
/// uniform density times the area element of the inverse measurement map.
/// This is the density actually induced by Cartesian-uniform false alarms and
/// is the f_c used in all likelihood ratios. Floored at the in-region value so
/// border measurements cannot carry infinite evidence.
inline double clutter_density_meas(const RangeBearing& z, const Rect& region,
                                   const Eigen::Vector2d& rx, const Eigen::Vector2d& tx,
                                   double range_scale, bool monostatic) {
  const double jac = meas_space_jacobian(z, rx, tx, range_scale, monostatic);
  return jac / region.area();
}

/// New-PT prior: Gaussian position centered at the Cartesian-converted
/// measurement (std birth_pos_std), velocity uniform on the configured box.
inline double birth_pdf(const State4& x, const RangeBearing& z, const State4& rx,
                        const State4& tx, const ModelConfig& cfg, bool monostatic) {
  const Eigen::Vector2d center =
      mot_to_cartesian(z, position_of(rx), position_of(tx), cfg.range_scale, monostatic);
  const double v = cfg.birth_vel_max;
  if (std::abs(x[2]) > v || std::abs(x[3]) > v) return 0.0;
  const double pos_pdf = gauss_pdf(x[0], center.x(), cfg.birth_pos_std) *
                         gauss_pdf(x[1], center.y(), cfg.birth_pos_std);
  return pos_pdf / (4.0 * v * v);
}

/// Draws a state from the birth prior around measurement z.
inline State4 sample_birth(const RangeBearing& z, const Eigen::Vector2d& rx_pos,
                           const Eigen::Vector2d& tx_pos, const ModelConfig& cfg,
                           bool monostatic, RandomStream& rng) {
  const Eigen::Vector2d center =
      mot_to_cartesian(z, rx_pos, tx_pos, cfg.range_scale, monostatic);
  State4 x;
  x[0] = center.x() + cfg.birth_pos_std * rng.normal();
  x[1] = center.y() + cfg.birth_pos_std * rng.normal();
  x[2] = rng.uniform_in(-cfg.birth_vel_max, cfg.birth_vel_max);
  x[3] = rng.uniform_in(-cfg.birth_vel_max, cfg.birth_vel_max);
  return x;
}

/// Precomputed constants for the hot range-bearing Gaussian kernel.
struct RbKernel {
  double inv_two_var_r;
  double inv_two_var_b;
  double norm;
  explicit RbKernel(const NoiseSpec& noise)
      : inv_two_var_r(0.5 / (noise.range_std * noise.range_std)),
        inv_two_var_b(0.5 / (noise.bearing_std * noise.bearing_std)),
        norm(1.0 / (2.0 * M_PI * noise.range_std * noise.bearing_std)) {}

  double eval(double dr, double db_deg) const {
    const double a = inv_two_var_r * dr * dr + inv_two_var_b * db_deg * db_deg;
    return a > 40.0 ? 0.0 : norm * std::exp(-a);
  }
};

}  // namespace jolt
