#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "jolt/geometry.hpp"

namespace jolt {

/// Known-origin range-bearing measurement between two agents.
struct InterAgentMeas {
  int rx = 0;  // agent ids, 1-based
  int tx = 0;
  RangeBearing value;
};

/// Ordered agent pair producing MOT measurements. rx == tx is monostatic.
struct PairKey {
  int rx = 0;
  int tx = 0;
  bool monostatic() const { return rx == tx; }
  auto operator<=>(const PairKey&) const = default;
};

/// All observations for one time step. Absent entries mean the corresponding
/// likelihood factor is dropped: an agent missing from `nav` has no navigation
/// data, a pair missing from `mot` did not sense at all, while a pair mapped
/// to an empty list sensed and produced zero measurements.
struct MeasurementFrame {
  std::map<int, Eigen::Vector2d> nav;      // agent id -> position observation
  std::vector<InterAgentMeas> inter_agent;
  std::map<PairKey, std::vector<RangeBearing>> mot;
};

}  // namespace jolt
