#pragma once

#include <string>
#include <vector>

#include "imp/energy.hpp"
#include "imp/sim.hpp"
#include "imp/world.hpp"

namespace imp::cli {

/// Static overview of one run: table, objects at start (solid) and end
/// (dashed), targets, the robot path and imagined-state markers. Millimeters,
/// y up.
std::string overview_svg(const WorldState& start, const WorldState& end, const std::vector<TrajectoryRow>& rows);

struct FieldGrid {
  double step = 0.005;  ///< m
};

/// x,y,potential,fx,fy over the landscape's valid disc.
std::string field_csv(const EnergyLandscape& landscape, const FieldGrid& grid = {});

/// Potential heat map with a coarse quiver of the conservative force.
std::string field_svg(const WorldState& world, const EnergyLandscape& landscape, const FieldGrid& grid = {});

}  // namespace imp::cli
