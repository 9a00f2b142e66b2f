// cdswarm: plan, simulate and report continuum-deformation missions.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cdswarm/errors.hpp"
#include "cdswarm/report.hpp"
#include "cdswarm/scenario.hpp"

namespace fs = std::filesystem;
using namespace cdswarm;

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kValidation = 2,
    kNoPath = 3,
    kSimAbort = 4,
    kAuditFailed = 5,
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::ValidationError:
        case ErrorCode::GoalOffGrid:
        case ErrorCode::DegenerateBasis:
        case ErrorCode::AgentOutsideTriangle:
        case ErrorCode::InfeasibleMargins:
        case ErrorCode::DeltaExceedsMax:
            return kValidation;
        case ErrorCode::NoPath:
        case ErrorCode::BudgetExceeded:
            return kNoPath;
        case ErrorCode::NonFiniteState:
        case ErrorCode::GimbalLock:
        case ErrorCode::ThrustSingularity:
            return kSimAbort;
        default:
            return kFailure;
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
    out << text;
}

// Actual planar positions per recorded time from a uavs.csv written by `simulate`.
std::map<double, std::vector<Point2>> read_actual_positions(const fs::path& path) {
    std::map<double, std::vector<Point2>> out;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        double t = 0, x = 0, y = 0;
        unsigned uav = 0;
        if (std::sscanf(line.c_str(), "%lf,%u,%lf,%lf", &t, &uav, &x, &y) == 4) out[t].push_back({x, y});
    }
    return out;
}

int cmd_validate(const std::string& scenario_path) {
    const Scenario s = load_scenario(scenario_path);
    const SafetyMargins m = scenario_margins(s);
    std::cout << s.name << ": ok (" << 3 + s.followers.size() << " UAVs, d_s = " << m.d_s << " m, d_b = " << m.d_b
              << " m, delta_max = " << m.delta_max << " m, lambda_cd_min = " << m.lambda_cd_min << ")\n";
    return kOk;
}

int cmd_plan(const std::string& scenario_path, const fs::path& out_dir) {
    const Scenario s = load_scenario(scenario_path);
    const LeaderPlan plan = plan_mission(s);
    fs::create_directories(out_dir);
    save_plan(out_dir / "plan.json", plan, s.planner.dt);
    std::cout << s.name << ": " << plan.waypoints.size() - 1 << " segments, cost " << plan.cost << ", "
              << plan.expansions << " expansions, horizon " << (plan.waypoints.size() - 1) * s.planner.dt
              << " s -> " << (out_dir / "plan.json").string() << '\n';
    return kOk;
}

int cmd_simulate(const std::string& scenario_path, const fs::path& plan_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
    Scenario s = load_scenario(scenario_path);
    if (seed) s.sim.seed = *seed;
    const LeaderPlan plan = load_plan(plan_path);
    const SimLog log = simulate_mission(s, plan);
    const SafetyMargins margins = scenario_margins(s);
    const AuditReport report = audit(log, margins);

    fs::create_directories(out_dir);
    {
        std::ofstream u(out_dir / "uavs.csv");
        write_uav_csv(u, log);
        std::ofstream f(out_dir / "fleet.csv");
        write_fleet_csv(f, log);
    }
    write_text(out_dir / "audit.json", audit_to_json(report, log, margins).dump(2) + "\n");

    std::cout << s.name << ": max deviation " << report.max_deviation << " m (" << report.max_deviation_after_transient
              << " m after " << log.transient << " s), min separation " << report.min_pair_distance
              << " m, max C_Col " << report.max_c_col << ", NFZ hit steps " << report.nfz_hits << '\n';
    if (!log.completed()) {
        std::cerr << "simulation aborted: " << log.abort_reason << '\n';
        return kSimAbort;
    }
    if (!report.passed()) {
        std::cerr << "audit FAILED (see audit.json)\n";
        return kAuditFailed;
    }
    std::cout << "audit passed\n";
    return kOk;
}

int cmd_report(const std::string& scenario_path, const fs::path& plan_path, const fs::path& out_dir,
               double sample_dt, double snapshot_every) {
    const Scenario s = load_scenario(scenario_path);
    const LeaderPlan plan = load_plan(plan_path);
    const SwarmTrajectory traj = mission_trajectory(s, plan);
    const SafetyMargins margins = scenario_margins(s);
    fs::create_directories(out_dir);

    write_text(out_dir / "paths.svg", paths_svg(s, traj));
    const auto series = deformation_series(traj, sample_dt, margins.lambda_cd_min);
    write_text(out_dir / "eigenvalues.svg", eigenvalue_svg(series, s.name + ": eigenvalues of U_CD"));

    const auto actual = read_actual_positions(out_dir / "uavs.csv");
    const double end = std::max(traj.horizon(), s.sim.duration);
    int written = 0;
    for (double t : snapshot_times(end, snapshot_every)) {
        std::optional<std::vector<Point2>> at;
        if (!actual.empty()) {
            auto it = actual.lower_bound(t - 1e-9);
            if (it != actual.end() && std::abs(it->first - t) < 0.5 * snapshot_every) at = it->second;
        }
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_t%06.1f.svg", t);
        write_text(out_dir / name, snapshot_svg(s, traj, t, at));
        ++written;
    }
    std::cout << s.name << ": wrote paths.svg, eigenvalues.svg and " << written << " snapshots to " << out_dir.string()
              << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuum-deformation swarm mission planner and simulator"};
    app.require_subcommand(1);

    std::string scenario;
    std::string plan_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    double sample_dt = 0.5;
    double snapshot_every = 25.0;

    auto* validate = app.add_subcommand("validate", "Check a scenario file and print its safety margins");
    validate->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);

    auto* plan = app.add_subcommand("plan", "Plan leader waypoints with A*");
    plan->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    plan->add_option("--out-dir", out_dir, "Output directory for plan.json");

    auto* simulate = app.add_subcommand("simulate", "Fly the plan in closed loop and audit it");
    simulate->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--plan", plan_path, "Plan JSON (default <out-dir>/plan.json)");
    simulate->add_option("--out-dir", out_dir, "Output directory for CSV logs and audit.json");
    auto* seed_opt = simulate->add_option("--seed", seed, "Override the scenario's perturbation seed");

    auto* report = app.add_subcommand("report", "Render SVG figures for a plan (and simulation, if present)");
    report->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    report->add_option("--plan", plan_path, "Plan JSON (default <out-dir>/plan.json)");
    report->add_option("--out-dir", out_dir, "Directory with uavs.csv; figures are written here");
    report->add_option("--sample-dt", sample_dt, "Eigenvalue sampling interval (s)")->check(CLI::PositiveNumber);
    report->add_option("--snapshot-every", snapshot_every, "Snapshot interval (s)")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);
    if (plan_path.empty()) plan_path = (fs::path(out_dir) / "plan.json").string();

    try {
        if (*validate) return cmd_validate(scenario);
        if (*plan) return cmd_plan(scenario, out_dir);
        if (*simulate) {
            return cmd_simulate(scenario, plan_path, out_dir,
                                *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt);
        }
        if (*report) return cmd_report(scenario, plan_path, out_dir, sample_dt, snapshot_every);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
