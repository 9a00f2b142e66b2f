#pragma once

// A* over lattice configurations of the leading triangle. Each leader moves
// independently by h * dp per axis with h in {-1, 0, 1}; only valid
// deformations whose straight-line segment is also certified are expanded.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cdswarm/environment.hpp"
#include "cdswarm/geometry.hpp"
#include "cdswarm/safety.hpp"

namespace cdswarm {

enum class RiskCost {
    Difference,  // zeta_h |Pr(next) - Pr(current)|
    Exposure,    // zeta_h (Pr(current) + Pr(next)) / 2 * dt
};

enum class WalkerRisk {
    Corridor,    // walkers smeared over their whole path, time-invariant
    AtNodeTime,  // walker position at t = k dt (not optimal under config keying)
};

struct PlannerConfig {
    double dp_x = 1.0;  // m
    double dp_y = 1.0;  // m
    double dt = 1.0;    // s per lattice step
    std::array<double, 3> zeta_s{1.0, 1.0, 1.0};
    std::array<double, 3> zeta_h{0.0, 0.0, 0.0};
    std::size_t max_expansions = 2'000'000;
    RiskCost risk_cost = RiskCost::Difference;
    WalkerRisk walker_risk = WalkerRisk::Corridor;
    bool certify_segments = true;
    // Among equal-cost plans, return one whose leading run of rigid translations is longest.
    bool prefer_rigid = true;
};

/// Throws ValidationError on non-positive steps or zeta_s < 1 / zeta_h < 0.
void validate(const PlannerConfig& cfg);

// Lattice offsets (in steps of dp) of the three leaders from the initial configuration.
using LatticeKey = std::array<std::int32_t, 6>;

struct PlanNode {
    TriangleConfig config;
    LatticeKey key{};
    int time_index = 0;
    double g = 0.0;
    double h = 0.0;
    std::int64_t parent = -1;  // index into the search arena, -1 for the root
};

struct LeaderPlan {
    std::vector<TriangleConfig> waypoints;  // first = initial, last = goal
    std::vector<double> times;              // t_k = k * dt
    double cost = 0.0;
    std::size_t expansions = 0;
};

// Lattice geometry anchored at the initial configuration.
struct Lattice {
    TriangleConfig origin;
    double dp_x = 1.0;
    double dp_y = 1.0;

    TriangleConfig config(const LatticeKey& key) const;
};

inline constexpr int kMovesPerNode = 729;  // 9 moves per leader, three leaders

/// Applies move index m in [0, 729) to a key.
LatticeKey apply_move(const LatticeKey& key, int move);

/// Valid successors, in move-index order. The candidate filter runs under
/// OpenMP; successors_serial is the single-threaded reference.
std::vector<PlanNode> successors(const PlanNode& node, const Lattice& lattice,
                                 const SafetyMargins& margins, const Environment& env,
                                 bool certify_segments = true);
std::vector<PlanNode> successors_serial(const PlanNode& node, const Lattice& lattice,
                                        const SafetyMargins& margins, const Environment& env,
                                        bool certify_segments = true);

double heuristic(const TriangleConfig& config, const TriangleConfig& goal);

double stage_cost(const PlanNode& current, const PlanNode& next, const PlannerConfig& cfg,
                  const Environment& env);

/// Throws GoalOffGrid, NoPath or BudgetExceeded.
LeaderPlan astar(const TriangleConfig& initial, const TriangleConfig& goal,
                 const PlannerConfig& cfg, const SafetyMargins& margins, const Environment& env);

/// Goal offsets on the lattice; throws GoalOffGrid when not representable.
LatticeKey goal_key(const TriangleConfig& initial, const TriangleConfig& goal, double dp_x,
                    double dp_y);

}  // namespace cdswarm
