#include "cdswarm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cdswarm/errors.hpp"

namespace cdswarm {

namespace {

struct KeyHash {
    std::size_t operator()(const LatticeKey& k) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int32_t v : k) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

constexpr int kIdentityMove = 4 + 9 * 4 + 81 * 4;

PlanNode make_child(const PlanNode& node, const Lattice& lattice, int move) {
    PlanNode child;
    child.key = apply_move(node.key, move);
    child.config = lattice.config(child.key);
    child.time_index = node.time_index + 1;
    return child;
}

bool admissible_move(const PlanNode& node, const PlanNode& child, const Lattice& lattice,
                     const SafetyMargins& margins, const Environment& env, bool certify) {
    if (!valid_deformation(lattice.origin, child.config, margins, env)) return false;
    return !certify || segment_certified(lattice.origin, node.config, child.config, margins, env);
}

double planning_probability(const Environment& env, Point2 p, int time_index, const PlannerConfig& cfg) {
    if (cfg.walker_risk == WalkerRisk::AtNodeTime) return human_probability(env, p, time_index * cfg.dt);
    return corridor_probability(env, p);
}

}  // namespace

void validate(const PlannerConfig& cfg) {
    std::ostringstream msg;
    if (!(cfg.dp_x > 0.0) || !(cfg.dp_y > 0.0) || !(cfg.dt > 0.0)) msg << "dp_x, dp_y and dt must be positive; ";
    for (double z : cfg.zeta_s) {
        if (!(z >= 1.0)) msg << "zeta_s entries must be >= 1 for an admissible heuristic; ";
    }
    for (double z : cfg.zeta_h) {
        if (!(z >= 0.0)) msg << "zeta_h entries must be >= 0; ";
    }
    if (cfg.max_expansions == 0) msg << "max_expansions must be positive; ";
    if (!msg.str().empty()) throw Error(ErrorCode::ValidationError, msg.str());
}

TriangleConfig Lattice::config(const LatticeKey& key) const {
    TriangleConfig t;
    for (std::size_t l = 0; l < 3; ++l) {
        t[l] = {origin[l].x + key[2 * l] * dp_x, origin[l].y + key[2 * l + 1] * dp_y};
    }
    return t;
}

LatticeKey apply_move(const LatticeKey& key, int move) {
    LatticeKey out = key;
    for (std::size_t l = 0; l < 3; ++l) {
        const int digit = move % 9;
        move /= 9;
        out[2 * l] += digit % 3 - 1;
        out[2 * l + 1] += digit / 3 - 1;
    }
    return out;
}

std::vector<PlanNode> successors_serial(const PlanNode& node, const Lattice& lattice,
                                        const SafetyMargins& margins, const Environment& env,
                                        bool certify_segments) {
    std::vector<PlanNode> out;
    for (int move = 0; move < kMovesPerNode; ++move) {
        if (move == kIdentityMove) continue;
        PlanNode child = make_child(node, lattice, move);
        if (admissible_move(node, child, lattice, margins, env, certify_segments)) out.push_back(child);
    }
    return out;
}

std::vector<PlanNode> successors(const PlanNode& node, const Lattice& lattice,
                                 const SafetyMargins& margins, const Environment& env,
                                 bool certify_segments) {
    std::array<PlanNode, kMovesPerNode> children;
    std::array<char, kMovesPerNode> ok{};
#pragma omp parallel for schedule(static)
    for (int move = 0; move < kMovesPerNode; ++move) {
        if (move == kIdentityMove) continue;
        children[move] = make_child(node, lattice, move);
        ok[move] = admissible_move(node, children[move], lattice, margins, env, certify_segments);
    }
    std::vector<PlanNode> out;
    for (int move = 0; move < kMovesPerNode; ++move) {
        if (ok[move]) out.push_back(children[move]);
    }
    return out;
}

double heuristic(const TriangleConfig& config, const TriangleConfig& goal) {
    double sum = 0.0;
    for (std::size_t l = 0; l < 3; ++l) sum += (config[l] - goal[l]).squared_norm();
    return std::sqrt(sum);
}

double stage_cost(const PlanNode& current, const PlanNode& next, const PlannerConfig& cfg,
                  const Environment& env) {
    double cost = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
        cost += cfg.zeta_s[l] * distance(next.config[l], current.config[l]);
        if (cfg.zeta_h[l] == 0.0) continue;
        const double pc = planning_probability(env, current.config[l], current.time_index, cfg);
        const double pn = planning_probability(env, next.config[l], next.time_index, cfg);
        if (cfg.risk_cost == RiskCost::Difference) {
            cost += cfg.zeta_h[l] * std::abs(pn - pc);
        } else {
            cost += cfg.zeta_h[l] * 0.5 * (pc + pn) * cfg.dt;
        }
    }
    return cost;
}

LatticeKey goal_key(const TriangleConfig& initial, const TriangleConfig& goal, double dp_x, double dp_y) {
    LatticeKey key{};
    for (std::size_t l = 0; l < 3; ++l) {
        const double steps[2] = {(goal[l].x - initial[l].x) / dp_x, (goal[l].y - initial[l].y) / dp_y};
        for (int a = 0; a < 2; ++a) {
            const double r = std::round(steps[a]);
            if (std::abs(steps[a] - r) > 1e-9 * std::max(1.0, std::abs(r))) {
                std::ostringstream msg;
                msg << "goal of leader " << l + 1 << " is " << steps[a] << " lattice steps from its start";
                throw Error(ErrorCode::GoalOffGrid, msg.str());
            }
            key[2 * l + a] = static_cast<std::int32_t>(r);
        }
    }
    return key;
}

namespace {

bool is_translation(const LatticeKey& from, const LatticeKey& to) {
    for (int a = 0; a < 2; ++a) {
        const std::int32_t step = to[a] - from[a];
        if (to[2 + a] - from[2 + a] != step || to[4 + a] - from[4 + a] != step) return false;
    }
    return true;
}

}  // namespace

LeaderPlan astar(const TriangleConfig& initial, const TriangleConfig& goal, const PlannerConfig& cfg,
                 const SafetyMargins& margins, const Environment& env) {
    validate(cfg);
    const LatticeKey target = goal_key(initial, goal, cfg.dp_x, cfg.dp_y);
    const Lattice lattice{initial, cfg.dp_x, cfg.dp_y};
    if (!valid_deformation(initial, lattice.config(target), margins, env)) {
        throw Error(ErrorCode::NoPath, "goal configuration is not a valid deformation");
    }

    // Costs within kCostTie of each other count as equal so that plans differing
    // only in summation order tie. The returned cost is then optimal to within
    // the same margin.
    constexpr double kCostTie = 1e-10;
    struct OpenEntry {
        long long f;  // bucketed f
        double h;
        LatticeKey key;
        std::int64_t index;
    };
    auto bucket = [](double f) { return std::llround(f / kCostTie); };
    // Min-heap on (f, h, key).
    auto worse = [](const OpenEntry& a, const OpenEntry& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.h != b.h) return a.h > b.h;
        return a.key > b.key;
    };
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, decltype(worse)> open(worse);

    // Number of leading rigid translations on the path to each arena node, and
    // whether the whole path so far is rigid.
    struct RigidTrace {
        int prefix = 0;
        bool whole = true;
    };
    std::vector<PlanNode> arena;
    std::vector<RigidTrace> trace;
    std::unordered_map<LatticeKey, std::int64_t, KeyHash> best;  // key -> arena index
    std::unordered_set<LatticeKey, KeyHash> closed;

    PlanNode root;
    root.config = initial;
    root.h = heuristic(initial, lattice.config(target));
    arena.push_back(root);
    trace.push_back({});
    best.emplace(root.key, 0);
    open.push({bucket(root.h), root.h, root.key, 0});

    const TriangleConfig goal_config = lattice.config(target);
    std::size_t expansions = 0;
    std::optional<long long> goal_f;

    auto extract = [&]() {
        const std::int64_t goal_index = best.at(target);
        LeaderPlan plan;
        plan.cost = arena[goal_index].g;
        plan.expansions = expansions;
        for (std::int64_t i = goal_index; i >= 0; i = arena[i].parent) plan.waypoints.push_back(arena[i].config);
        std::reverse(plan.waypoints.begin(), plan.waypoints.end());
        plan.waypoints.back() = goal;
        for (std::size_t k = 0; k < plan.waypoints.size(); ++k) plan.times.push_back(k * cfg.dt);
        return plan;
    };

    while (!open.empty()) {
        const OpenEntry top = open.top();
        if (goal_f && top.f > *goal_f) break;
        open.pop();
        if (best.at(top.key) != top.index || closed.count(top.key)) continue;
        closed.insert(top.key);

        if (top.key == target) {
            // With prefer_rigid, keep draining equal-cost nodes: one of them may
            // offer the goal a parent with a longer rigid prefix.
            if (!cfg.prefer_rigid) return extract();
            if (!goal_f) goal_f = top.f;
            continue;
        }

        if (++expansions > cfg.max_expansions) {
            std::ostringstream msg;
            msg << "search stopped after " << cfg.max_expansions << " expansions";
            throw Error(ErrorCode::BudgetExceeded, msg.str());
        }

        const PlanNode current = arena[top.index];
        const RigidTrace current_trace = trace[top.index];
        for (PlanNode& child : successors(current, lattice, margins, env, cfg.certify_segments)) {
            child.g = current.g + stage_cost(current, child, cfg, env);
            RigidTrace child_trace;
            child_trace.whole = current_trace.whole && is_translation(current.key, child.key);
            child_trace.prefix = current_trace.prefix + (child_trace.whole ? 1 : 0);

            auto it = best.find(child.key);
            if (it != best.end()) {
                const double incumbent = arena[it->second].g;
                const bool cheaper = child.g < incumbent - kCostTie;
                const bool tie_win = cfg.prefer_rigid && std::abs(child.g - incumbent) <= kCostTie &&
                                     child_trace.prefix > trace[it->second].prefix;
                if (!cheaper && !tie_win) continue;
                closed.erase(child.key);
            }
            child.h = heuristic(child.config, goal_config);
            child.parent = top.index;
            const auto index = static_cast<std::int64_t>(arena.size());
            arena.push_back(child);
            trace.push_back(child_trace);
            best[child.key] = index;
            open.push({bucket(child.g + child.h), child.h, child.key, index});
        }
    }
    if (goal_f) return extract();
    throw Error(ErrorCode::NoPath, "open set exhausted before reaching the goal configuration");
}

}  // namespace cdswarm
