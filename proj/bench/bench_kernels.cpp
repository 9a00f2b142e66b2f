// OpenMP kernels against their serial references on the case1 fleet.

#include <filesystem>

#include <benchmark/benchmark.h>

#include "cdswarm/planner.hpp"
#include "cdswarm/scenario.hpp"
#include "cdswarm/sim.hpp"

using namespace cdswarm;

namespace {

const Scenario& case1() {
    static const Scenario s = load_scenario(std::filesystem::path(CDSWARM_SCENARIO_DIR) / "case1.json");
    return s;
}

template <auto Expand>
void BM_successors(benchmark::State& state) {
    const Scenario& s = case1();
    const SafetyMargins margins = scenario_margins(s);
    const Lattice lattice{s.initial, s.planner.dp_x, s.planner.dp_y};
    PlanNode root;
    root.config = s.initial;
    const bool certify = state.range(0) != 0;
    std::size_t kept = 0;
    for (auto _ : state) {
        const auto kids = Expand(root, lattice, margins, s.env, certify);
        kept = kids.size();
        benchmark::DoNotOptimize(kids.data());
    }
    state.counters["successors"] = static_cast<double>(kept);
    state.SetItemsProcessed(state.iterations() * kMovesPerNode);
}

// A rigid sweep across the field, long enough to keep the fleet moving.
SwarmTrajectory sweep(const Scenario& s) {
    std::vector<TriangleConfig> w{s.initial};
    for (int k = 1; k <= 4; ++k) {
        TriangleConfig next = w.back();
        for (auto& p : next.p) p = p + Point2{5.0, 0.0};
        w.push_back(next);
    }
    return SwarmTrajectory(w, s.planner.dt, s.altitude, s.followers);
}

template <auto Step>
void BM_step_fleet(benchmark::State& state) {
    const Scenario& s = case1();
    const SwarmTrajectory traj = sweep(s);
    const SafetyMargins margins = scenario_margins(s);
    const VehicleParams params;
    const Gains gains;
    FleetState fleet = initial_fleet(traj, margins, s.sim, params);
    const double h = s.sim.step;
    double t = 0.0;
    for (auto _ : state) {
        Step(fleet, traj, t, h, gains, params);
        t += h;
        if (t > traj.horizon()) t = 0.0;
        benchmark::DoNotOptimize(fleet.uavs.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fleet.uavs.size()));
}

}  // namespace

BENCHMARK(BM_successors<successors>)->Name("successors/omp")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_successors<successors_serial>)->Name("successors/serial")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_step_fleet<step_fleet>)->Name("step_fleet/omp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_step_fleet<step_fleet_serial>)->Name("step_fleet/serial")->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
