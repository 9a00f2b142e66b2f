#include "cdswarm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cdswarm/errors.hpp"

namespace cdswarm {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, where + ": " + what);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where, "expected a number");
    return j.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    return number(obj.at(key), where + "." + key);
}

const json& member(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) parse_fail(where, std::string("missing field '") + key + "'");
    return obj.at(key);
}

Point2 point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) parse_fail(where, "expected [x, y]");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

TriangleConfig triangle(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) parse_fail(where, "expected three [x, y] leader positions");
    TriangleConfig t;
    for (std::size_t l = 0; l < 3; ++l) t[l] = point(j[l], where + "[" + std::to_string(l) + "]");
    return t;
}

Rect rect(const json& j, const std::string& where) {
    return {point(member(j, "min", where), where + ".min"), point(member(j, "max", where), where + ".max")};
}

std::array<double, 3> triple(const json& obj, const char* key, std::array<double, 3> fallback,
                             const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& j = obj.at(key);
    if (j.is_number()) {
        const double v = j.get<double>();
        return {v, v, v};
    }
    if (!j.is_array() || j.size() != 3) parse_fail(where + "." + key, "expected a number or three numbers");
    return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

std::vector<double> read_csv_grid(const std::filesystem::path& path, int& nx, int& ny) {
    std::ifstream in(path);
    if (!in) parse_fail(path.string(), "cannot open risk raster");
    std::vector<double> values;
    std::string line;
    nx = -1;
    ny = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int count = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                parse_fail(path.string(), "non-numeric cell '" + cell + "'");
            }
            ++count;
        }
        if (nx >= 0 && count != nx) parse_fail(path.string(), "ragged rows");
        nx = count;
        ++ny;
    }
    return values;
}

RiskField parse_risk(const json& j, const Rect& bounds, const std::filesystem::path& base_dir) {
    const std::string where = "risk";
    const double cell = number_or(j, "cell_size_m", 1.0, where);
    if (!(cell > 0.0)) parse_fail(where + ".cell_size_m", "must be positive");

    if (j.contains("values") || j.contains("csv")) {
        const Point2 origin = j.contains("origin_m") ? point(j.at("origin_m"), where + ".origin_m") : bounds.min;
        int nx = 0, ny = 0;
        std::vector<double> values;
        if (j.contains("csv")) {
            values = read_csv_grid(base_dir / j.at("csv").get<std::string>(), nx, ny);
        } else {
            const json& rows = j.at("values");
            if (!rows.is_array() || rows.empty()) parse_fail(where + ".values", "expected rows of numbers");
            ny = static_cast<int>(rows.size());
            nx = static_cast<int>(rows[0].size());
            for (const json& row : rows) {
                if (!row.is_array() || static_cast<int>(row.size()) != nx) parse_fail(where + ".values", "ragged rows");
                for (const json& v : row) values.push_back(number(v, where + ".values"));
            }
        }
        // Rows run along +y from the origin.
        return RiskField(origin, cell, nx, ny, std::move(values));
    }

    // Synthetic field: background plus Gaussian population centres, rasterised over the bounds.
    const double background = number_or(j, "background", 0.0, where);
    RiskField base = RiskField::uniform(bounds, cell, 0.0);
    std::vector<double> values(base.values().size());
    const json gaussians = j.value("gaussians", json::array());
    for (int jy = 0; jy < base.ny(); ++jy) {
        for (int ix = 0; ix < base.nx(); ++ix) {
            const Point2 p{base.origin().x + ix * cell, base.origin().y + jy * cell};
            double v = background;
            for (std::size_t g = 0; g < gaussians.size(); ++g) {
                const std::string gw = where + ".gaussians[" + std::to_string(g) + "]";
                const Point2 c = point(member(gaussians[g], "center_m", gw), gw + ".center_m");
                const double sigma = number(member(gaussians[g], "sigma_m", gw), gw + ".sigma_m");
                const double peak = number(member(gaussians[g], "peak", gw), gw + ".peak");
                v += peak * std::exp(-(p - c).squared_norm() / (2.0 * sigma * sigma));
            }
            values[static_cast<std::size_t>(jy) * base.nx() + ix] = std::clamp(v, 0.0, 1.0);
        }
    }
    return RiskField(base.origin(), cell, base.nx(), base.ny(), std::move(values));
}

}  // namespace

std::vector<Point2> lattice_followers(const TriangleConfig& t0, int divisions) {
    std::vector<Point2> out;
    for (int i = divisions - 2; i >= 1; --i) {
        for (int j = 1; i + j < divisions; ++j) {
            const int k = divisions - i - j;
            const BarycentricWeights w{static_cast<double>(i) / divisions, static_cast<double>(j) / divisions,
                                       static_cast<double>(k) / divisions};
            out.push_back(follower_position(w, t0));
        }
    }
    return out;
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) parse_fail("scenario", "expected a JSON object");
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    s.env.bounds = rect(member(j, "bounds_m", "scenario"), "bounds_m");
    for (std::size_t i = 0; const json& z : j.value("no_fly_zones_m", json::array())) {
        s.env.nfz.push_back(rect(z, "no_fly_zones_m[" + std::to_string(i++) + "]"));
    }
    s.env.risk = j.contains("risk") ? parse_risk(j.at("risk"), s.env.bounds, base_dir)
                                    : RiskField::uniform(s.env.bounds, 1.0, 0.0);
    for (std::size_t i = 0; const json& w : j.value("walkers", json::array())) {
        const std::string where = "walkers[" + std::to_string(i++) + "]";
        Walker walker;
        walker.start = point(member(w, "start_m", where), where + ".start_m");
        walker.end = point(member(w, "end_m", where), where + ".end_m");
        walker.speed = number(member(w, "speed_mps", where), where + ".speed_mps");
        walker.radius_of_influence = number_or(w, "radius_of_influence_m", 5.0, where);
        walker.peak_probability = number_or(w, "peak_probability", 1.0, where);
        s.env.walkers.push_back(walker);
    }

    s.initial = triangle(member(j, "leaders_initial_m", "scenario"), "leaders_initial_m");
    s.goal = triangle(member(j, "leaders_goal_m", "scenario"), "leaders_goal_m");
    if (j.contains("followers_m")) {
        for (std::size_t i = 0; const json& p : j.at("followers_m")) {
            s.followers.push_back(point(p, "followers_m[" + std::to_string(i++) + "]"));
        }
    } else if (j.contains("follower_lattice_divisions")) {
        const json& n = j.at("follower_lattice_divisions");
        if (!n.is_number_integer() || n.get<int>() < 3) parse_fail("follower_lattice_divisions", "expected an integer >= 3");
        s.followers = lattice_followers(s.initial, n.get<int>());
    }
    s.epsilon = number(member(j, "epsilon_m", "scenario"), "epsilon_m");
    s.delta = number_or(j, "delta_m", 0.1, "scenario");
    s.altitude = number_or(j, "altitude_m", 10.0, "scenario");

    const json planner = j.value("planner", json::object());
    s.planner.dp_x = number_or(planner, "dp_x_m", 1.0, "planner");
    s.planner.dp_y = number_or(planner, "dp_y_m", 1.0, "planner");
    s.planner.dt = number_or(planner, "dt_s", 1.0, "planner");
    s.planner.zeta_s = triple(planner, "zeta_s", {1.0, 1.0, 1.0}, "planner");
    s.planner.zeta_h = triple(planner, "zeta_h", {0.0, 0.0, 0.0}, "planner");
    s.planner.max_expansions = static_cast<std::size_t>(number_or(planner, "max_expansions", 2e6, "planner"));
    const std::string cost = planner.value("risk_cost", std::string("difference"));
    if (cost == "difference") s.planner.risk_cost = RiskCost::Difference;
    else if (cost == "exposure") s.planner.risk_cost = RiskCost::Exposure;
    else parse_fail("planner.risk_cost", "expected 'difference' or 'exposure'");
    const std::string walker_risk = planner.value("walker_risk", std::string("corridor"));
    if (walker_risk == "corridor") s.planner.walker_risk = WalkerRisk::Corridor;
    else if (walker_risk == "node_time") s.planner.walker_risk = WalkerRisk::AtNodeTime;
    else parse_fail("planner.walker_risk", "expected 'corridor' or 'node_time'");
    s.planner.certify_segments = planner.value("certify_segments", true);
    s.planner.prefer_rigid = planner.value("prefer_rigid", true);

    const json gains = j.value("gains", json::object());
    Gains& g = s.gains;
    g.gamma1 = number_or(gains, "gamma1", g.gamma1, "gains");
    g.gamma2 = number_or(gains, "gamma2", g.gamma2, "gains");
    g.k_thrust = number_or(gains, "k_thrust", g.k_thrust, "gains");
    g.k_thrust_rate = number_or(gains, "k_thrust_rate", g.k_thrust_rate, "gains");
    g.k_phi = number_or(gains, "k_phi", g.k_phi, "gains");
    g.k_phi_rate = number_or(gains, "k_phi_rate", g.k_phi_rate, "gains");
    g.k_theta = number_or(gains, "k_theta", g.k_theta, "gains");
    g.k_theta_rate = number_or(gains, "k_theta_rate", g.k_theta_rate, "gains");
    g.k_psi = number_or(gains, "k_psi", g.k_psi, "gains");
    g.k_psi_rate = number_or(gains, "k_psi_rate", g.k_psi_rate, "gains");

    const json vehicle = j.value("vehicle", json::object());
    s.vehicle.g = number_or(vehicle, "gravity_mps2", kGravity, "vehicle");
    if (vehicle.contains("saturation")) {
        const json& sat = vehicle.at("saturation");
        s.vehicle.saturation = InputLimits{number_or(sat, "thrust_mps4", 0.0, "vehicle.saturation"),
                                           number_or(sat, "angular_radps2", 0.0, "vehicle.saturation")};
    }

    const json sim = j.value("sim", json::object());
    s.sim.step = number_or(sim, "step_s", 0.01, "sim");
    s.sim.duration = number_or(sim, "duration_s", 0.0, "sim");
    s.sim.record_decimation = static_cast<int>(number_or(sim, "record_decimation", 10, "sim"));
    s.sim.seed = static_cast<std::uint64_t>(number_or(sim, "seed", 1, "sim"));
    s.sim.perturb_initial = sim.value("perturb_initial", false);
    s.sim.transient = number_or(sim, "transient_s", 2.0, "sim");
    return s;
}

std::vector<std::string> validation_problems(const Scenario& s) {
    std::vector<std::string> out;
    auto check = [&](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            out.emplace_back(e.what());
        }
    };
    const Rect& b = s.env.bounds;
    if (!(b.max.x > b.min.x && b.max.y > b.min.y)) out.emplace_back("bounds_m: max must exceed min");
    for (std::size_t i = 0; i < s.env.nfz.size(); ++i) {
        const Rect& z = s.env.nfz[i];
        if (!(z.max.x >= z.min.x && z.max.y >= z.min.y)) out.push_back("no_fly_zones_m[" + std::to_string(i) + "]: max below min");
        if (!b.contains(z)) out.push_back("no_fly_zones_m[" + std::to_string(i) + "] leaves the motion space");
    }
    if (!s.env.risk.extent().contains(b)) out.emplace_back("risk grid does not cover the motion space");
    for (std::size_t i = 0; i < s.env.walkers.size(); ++i) {
        const Walker& w = s.env.walkers[i];
        const std::string where = "walkers[" + std::to_string(i) + "]";
        if (!(w.speed > 0.0)) out.push_back(where + ": speed must be positive");
        if (!(w.peak_probability >= 0.0 && w.peak_probability <= 1.0)) out.push_back(where + ": peak_probability outside [0, 1]");
        if (!(w.radius_of_influence > 0.0)) out.push_back(where + ": radius_of_influence must be positive");
    }
    if (!(s.epsilon > 0.0)) out.emplace_back("epsilon_m must be positive");
    if (!(s.delta >= 0.0)) out.emplace_back("delta_m must be non-negative");
    if (!triangle_rank_ok(s.initial)) out.emplace_back("leaders_initial_m: leaders are collinear");
    if (!triangle_rank_ok(s.goal)) out.emplace_back("leaders_goal_m: leaders are collinear");
    // The geometric checks below need a sane frame and triangles.
    const bool geometry_ok = out.empty();
    const bool grid_ok = s.planner.dp_x > 0.0 && s.planner.dp_y > 0.0;
    check([&] { validate(s.planner); });
    check([&] { validate(s.gains); });
    check([&] { validate(s.sim); });
    if (!geometry_ok) return out;

    SafetyMargins margins;
    bool have_margins = false;
    check([&] {
        margins = scenario_margins(s);
        have_margins = true;
    });
    if (grid_ok) check([&] { goal_key(s.initial, s.goal, s.planner.dp_x, s.planner.dp_y); });
    if (have_margins) {
        if (!triangle_clear(s.initial, margins.clearance(), s.env)) {
            out.emplace_back("leaders_initial_m: inflated triangle touches a no-fly zone or the bounds");
        }
        if (solve_deformation(s.initial, s.goal).det() <= 0.0) {
            out.emplace_back("leaders_goal_m: goal triangle has the opposite orientation");
        } else if (!valid_deformation(s.initial, s.goal, margins, s.env)) {
            out.emplace_back("leaders_goal_m: goal triangle is not a valid deformation (stretch below lambda_cd_min "
                             "or zone clearance)");
        }
    }
    return out;
}

SafetyMargins scenario_margins(const Scenario& s) {
    return make_margins(s.initial, s.followers, s.epsilon, s.delta);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open scenario " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    Scenario s;
    try {
        s = parse_scenario(j, path.parent_path());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    const auto problems = validation_problems(s);
    if (!problems.empty()) {
        std::string msg = path.string() + " has " + std::to_string(problems.size()) + " problem(s):";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw Error(ErrorCode::ValidationError, msg);
    }
    return s;
}

LeaderPlan plan_mission(const Scenario& s) {
    return astar(s.initial, s.goal, s.planner, scenario_margins(s), s.env);
}

SwarmTrajectory mission_trajectory(const Scenario& s, const LeaderPlan& plan) {
    return SwarmTrajectory(plan, s.planner.dt, s.altitude, s.followers);
}

SimLog simulate_mission(const Scenario& s, const LeaderPlan& plan) {
    return run(mission_trajectory(s, plan), s.env, scenario_margins(s), s.gains, s.vehicle, s.sim);
}

json plan_to_json(const LeaderPlan& plan, double dt) {
    json waypoints = json::array();
    for (std::size_t k = 0; k < plan.waypoints.size(); ++k) {
        json leaders = json::array();
        for (std::size_t l = 0; l < 3; ++l) leaders.push_back({plan.waypoints[k][l].x, plan.waypoints[k][l].y});
        waypoints.push_back({{"t_s", plan.times.empty() ? k * dt : plan.times[k]}, {"leaders_m", leaders}});
    }
    return {{"format", "cdswarm-plan"}, {"version", 1}, {"dt_s", dt}, {"cost", plan.cost},
            {"expansions", plan.expansions}, {"waypoints", waypoints}};
}

LeaderPlan plan_from_json(const json& j) {
    if (j.value("format", std::string()) != "cdswarm-plan") parse_fail("plan", "not a cdswarm-plan document");
    LeaderPlan plan;
    plan.cost = number(member(j, "cost", "plan"), "plan.cost");
    plan.expansions = j.value("expansions", std::size_t{0});
    for (std::size_t k = 0; const json& w : member(j, "waypoints", "plan")) {
        const std::string where = "plan.waypoints[" + std::to_string(k++) + "]";
        plan.times.push_back(number(member(w, "t_s", where), where + ".t_s"));
        plan.waypoints.push_back(triangle(member(w, "leaders_m", where), where + ".leaders_m"));
    }
    if (plan.waypoints.empty()) parse_fail("plan.waypoints", "empty");
    return plan;
}

void save_plan(const std::filesystem::path& path, const LeaderPlan& plan, double dt) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
    out << plan_to_json(plan, dt).dump(2) << '\n';
}

LeaderPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open plan " + path.string());
    try {
        return plan_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

json audit_to_json(const AuditReport& r, const SimLog& log, const SafetyMargins& m) {
    return {{"passed", r.passed()},
            {"completed", r.completed},
            {"abort_reason", log.abort_reason},
            {"epsilon_m", m.epsilon},
            {"delta_m", m.delta},
            {"delta_max_m", m.delta_max},
            {"lambda_cd_min", m.lambda_cd_min},
            {"max_deviation_m", r.max_deviation},
            {"max_deviation_after_transient_m", r.max_deviation_after_transient},
            {"transient_s", log.transient},
            {"tracking_ok", r.tracking_ok},
            {"hypothesis_ok", r.hypothesis_ok},
            {"min_pair_distance_m", r.min_pair_distance},
            {"separation_ok", r.separation_ok},
            {"max_c_col", r.max_c_col},
            {"certificate_ok", r.certificate_ok},
            {"nfz_hit_steps", r.nfz_hits},
            {"exposure_s", r.exposure}};
}

}  // namespace cdswarm
