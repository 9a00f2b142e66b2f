#pragma once

// Mission files: scenario (JSON), leader plan (JSON).

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdswarm/control.hpp"
#include "cdswarm/dynamics.hpp"
#include "cdswarm/environment.hpp"
#include "cdswarm/planner.hpp"
#include "cdswarm/safety.hpp"
#include "cdswarm/sim.hpp"
#include "cdswarm/trajectory.hpp"

namespace cdswarm {

struct Scenario {
    std::string name;
    Environment env;
    TriangleConfig initial;
    TriangleConfig goal;
    std::vector<Point2> followers;
    double epsilon = 0.5;   // m
    double delta = 0.1;     // m
    double altitude = 10.0; // m
    PlannerConfig planner;
    Gains gains;
    VehicleParams vehicle;
    SimConfig sim;
};

/// Throws ParseError for malformed JSON or wrongly typed fields and
/// ValidationError listing every violated invariant.
Scenario load_scenario(const std::filesystem::path& path);

/// Relative file references (risk CSV) resolve against base_dir.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Every violated invariant as a human-readable line; empty when valid.
std::vector<std::string> validation_problems(const Scenario& s);

SafetyMargins scenario_margins(const Scenario& s);

/// Followers on the interior barycentric lattice (i, j, k) / n, i, j, k >= 1.
std::vector<Point2> lattice_followers(const TriangleConfig& t0, int divisions);

LeaderPlan plan_mission(const Scenario& s);
SwarmTrajectory mission_trajectory(const Scenario& s, const LeaderPlan& plan);
SimLog simulate_mission(const Scenario& s, const LeaderPlan& plan);

nlohmann::json plan_to_json(const LeaderPlan& plan, double dt);
LeaderPlan plan_from_json(const nlohmann::json& j);
void save_plan(const std::filesystem::path& path, const LeaderPlan& plan, double dt);
LeaderPlan load_plan(const std::filesystem::path& path);

nlohmann::json audit_to_json(const AuditReport& report, const SimLog& log, const SafetyMargins& margins);

}  // namespace cdswarm
