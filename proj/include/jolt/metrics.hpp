#pragma once

#include <vector>

#include <Eigen/Dense>

namespace jolt {

struct OspaConfig {
  double p = 1.0;     // order, >= 1
  double c = 5000.0;  // cutoff, meters
};

/// Optimal subpattern assignment distance between two point sets. Uses
/// exhaustive assignment up to 6 elements and the Hungarian algorithm above.
/// Empty vs empty is 0; symmetric; bounded by cfg.c.
double ospa(const std::vector<Eigen::Vector2d>& estimates,
            const std::vector<Eigen::Vector2d>& truths, const OspaConfig& cfg);

/// Minimum total cost over one-to-one assignments of the smaller index set;
/// cost(i, j) addressed row-major with `cols` columns. Exposed for testing
/// the exhaustive/Hungarian agreement.
double min_assignment_cost(const std::vector<double>& cost, int rows, int cols,
                           bool exhaustive);

inline double position_error(const Eigen::Vector2d& estimate, const Eigen::Vector2d& truth) {
  return (estimate - truth).norm();
}

/// Per-time means across Monte Carlo runs; all runs must share the horizon.
std::vector<double> aggregate(const std::vector<std::vector<double>>& runs);

/// Picks, per truth track, the estimate track whose time-summed distance to it
/// is smallest, and returns that track's per-time position errors (NaN where
/// either is absent). Columns of `estimates` and `truth` are time steps; a
/// track absent at a step carries NaN.
std::vector<double> consistent_track_error(const std::vector<std::vector<Eigen::Vector2d>>& tracks,
                                           const std::vector<Eigen::Vector2d>& truth);

}  // namespace jolt
