#pragma once

// Static SVG figures for a planned and simulated mission.

#include <optional>
#include <string>
#include <vector>

#include "cdswarm/scenario.hpp"

namespace cdswarm {

/// Risk shading, no-fly zones, walker corridors, leader paths, and the initial
/// and goal formations.
std::string paths_svg(const Scenario& s, const SwarmTrajectory& traj);

/// lambda1 and lambda2 of the pure-deformation factor against time.
std::string eigenvalue_svg(const std::vector<DeformationSample>& series, const std::string& title);

/// Formation at time t: leading triangle, desired positions, optional actual
/// positions, and each walker at its position at t.
std::string snapshot_svg(const Scenario& s, const SwarmTrajectory& traj, double t,
                         const std::optional<std::vector<Point2>>& actual = std::nullopt);

/// 0, every, 2 * every, ... up to and including `end` when it is a multiple.
std::vector<double> snapshot_times(double end, double every);

}  // namespace cdswarm
