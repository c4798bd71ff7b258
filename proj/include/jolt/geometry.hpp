#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace jolt {

/// Range-bearing observation. Bearing is in degrees, clockwise from north
/// (+y axis), wrapped to [0, 360).
struct RangeBearing {
  double range = 0.0;
  double bearing_deg = 0.0;
};

inline double wrap_deg_360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

/// Signed shortest angular difference a - b, in (-180, 180].
inline double angle_diff_deg(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

/// Clockwise angle of (target - origin) from the +y axis, degrees in [0, 360).
inline double bearing_deg(const Eigen::Vector2d& origin, const Eigen::Vector2d& target) {
  const Eigen::Vector2d d = target - origin;
  if (d.x() == 0.0 && d.y() == 0.0) throw std::invalid_argument("undefined bearing");
  return wrap_deg_360(std::atan2(d.x(), d.y()) * 180.0 / M_PI);
}

/// Unit direction for a bearing: 0 deg -> +y, 90 deg -> +x.
inline Eigen::Vector2d bearing_dir(double bearing_deg_v) {
  const double rad = bearing_deg_v * M_PI / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

/// Noise-free monostatic prediction: range = range_scale * |rx - obj|.
inline RangeBearing predict_mono(const Eigen::Vector2d& rx, const Eigen::Vector2d& obj,
                                 double range_scale) {
  return {range_scale * (obj - rx).norm(), bearing_deg(rx, obj)};
}

/// Noise-free bistatic prediction: range = |rx - obj| + |tx - obj|, bearing at rx.
inline RangeBearing predict_bistatic(const Eigen::Vector2d& rx, const Eigen::Vector2d& tx,
                                     const Eigen::Vector2d& obj) {
  return {(obj - rx).norm() + (obj - tx).norm(), bearing_deg(rx, obj)};
}

/// Inverts a measurement to a Cartesian point on the bearing ray from the Rx.
/// Monostatic: distance = range / range_scale. Bistatic: one-way distance d
/// solving d + |rx + d*u - tx| = range (nonnegative root of the quadratic),
/// clamped to the geometrically admissible interval for noisy inputs.
inline Eigen::Vector2d mot_to_cartesian(const RangeBearing& z, const Eigen::Vector2d& rx,
                                        const Eigen::Vector2d& tx, double range_scale,
                                        bool monostatic) {
  const Eigen::Vector2d u = bearing_dir(z.bearing_deg);
  if (monostatic) return rx + (z.range / range_scale) * u;
  const Eigen::Vector2d w = tx - rx;
  const double base = w.norm();
  const double rho = std::max(z.range, base);
  double denom = 2.0 * (rho - u.dot(w));
  if (denom < 1e-9) denom = 1e-9;
  double d = (rho * rho - base * base) / denom;
  d = std::min(std::max(d, 0.0), 0.5 * (rho + base));
  return rx + d * u;
}

/// Area element |d(x,y) / d(range, bearing_deg)| of the measurement-to-Cartesian
/// map at the point implied by z; converts a Cartesian-uniform density into the
/// range-bearing measurement space.
inline double meas_space_jacobian(const RangeBearing& z, const Eigen::Vector2d& rx,
                                  const Eigen::Vector2d& tx, double range_scale,
                                  bool monostatic) {
  const Eigen::Vector2d p = mot_to_cartesian(z, rx, tx, range_scale, monostatic);
  const double d1 = std::max((p - rx).norm(), 1e-6);
  const Eigen::Vector2d u1 = (p - rx) / d1;
  Eigen::Vector2d grad_r;
  if (monostatic) {
    grad_r = range_scale * u1;
  } else {
    const double d2 = std::max((p - tx).norm(), 1e-6);
    grad_r = u1 + (p - tx) / d2;
  }
  // Bearing gradient (deg/m) is perpendicular to u1 with magnitude (180/pi)/d1.
  const Eigen::Vector2d grad_b = Eigen::Vector2d(u1.y(), -u1.x()) * (180.0 / M_PI / d1);
  const double det = std::abs(grad_r.x() * grad_b.y() - grad_r.y() * grad_b.x());
  return det < 1e-12 ? 1e12 : 1.0 / det;
}

}  // namespace jolt
