// Acceptance criteria 1-8. One PASS/FAIL line per criterion; exit status is
// the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"

#include "cdswarm/control.hpp"
#include "cdswarm/dynamics.hpp"
#include "cdswarm/errors.hpp"
#include "cdswarm/geometry.hpp"
#include "cdswarm/planner.hpp"
#include "cdswarm/report.hpp"
#include "cdswarm/safety.hpp"
#include "cdswarm/scenario.hpp"
#include "cdswarm/sim.hpp"
#include "cdswarm/trajectory.hpp"

using namespace cdswarm;

namespace {

const std::filesystem::path kScenarios{CDSWARM_SCENARIO_DIR};
const std::filesystem::path kArtifacts{CDSWARM_ARTIFACT_DIR};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Runs a criterion body; an escaped exception is a failure with its message.
void criterion(int id, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

Point2 random_interior(std::mt19937_64& rng, const TriangleConfig& t) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const double a = u(rng), b = u(rng);
        if (a + b >= 1.0 || a < 1e-3 || b < 1e-3 || a + b > 1.0 - 1e-3) continue;
        return (1.0 - a - b) * t[0] + a * t[1] + b * t[2];
    }
}

// Mission artefacts shared by criteria 5-7.
struct Mission {
    Scenario scenario;
    LeaderPlan plan;
    double plan_seconds = 0.0;
};

Mission plan_bundled(const std::string& file) {
    Mission m;
    m.scenario = load_scenario(kScenarios / file);
    const auto start = Clock::now();
    m.plan = plan_mission(m.scenario);
    m.plan_seconds = seconds_since(start);
    return m;
}

void homogeneous_map() {
    const auto start = Clock::now();
    const TriangleConfig t0{{Point2{5, 5}, Point2{20, 15}, Point2{5, 25}}};
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-20.0, 60.0);
    std::vector<Point2> points;
    for (int i = 0; i < 1000; ++i) points.push_back(random_interior(rng, t0));
    std::vector<BarycentricWeights> weights;
    for (Point2 p : points) weights.push_back(barycentric_weights(t0, p));

    int targets = 0;
    double worst = 0.0;
    while (targets < 100) {
        const TriangleConfig tc{{Point2{u(rng), u(rng)}, Point2{u(rng), u(rng)}, Point2{u(rng), u(rng)}}};
        if (tc.signed_area() < 10.0) continue;  // valid: non-degenerate, same orientation
        ++targets;
        const DeformationParams params = solve_deformation(t0, tc);
        const oracle::Affine ref = oracle::solve_affine_6x6(t0, tc);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const Point2 bary = follower_position(weights[i], tc);
            const Point2 lib = apply_deformation(params, points[i]);
            const Eigen::Vector2d ora = ref.q * Eigen::Vector2d(points[i].x, points[i].y) + ref.d;
            worst = std::max({worst, distance(bary, lib), std::hypot(bary.x - ora.x(), bary.y - ora.y())});
        }
    }
    const double elapsed = seconds_since(start);
    report(1, "homogeneous map", worst <= 1e-9 && elapsed < 5.0,
           fmt("max |bary - (Q R0 + D)| = %.3g m over 1000 points x 100 targets (tol 1e-9), %.2f s (limit 5 s)",
               worst, elapsed));
}

void polar_decomposition() {
    const auto start = Clock::now();
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double recon = 0, ortho = 0, sym = 0, lam = 0;
    int n = 0;
    while (n < 10000) {
        DeformationParams p;
        p.q << u(rng), u(rng), u(rng), u(rng);
        if (!(p.q.determinant() > 1e-6)) continue;
        ++n;
        const PolarDecomp pd = polar_decompose(p);
        const double scale = std::max(1.0, p.q.norm());
        recon = std::max(recon, (pd.r_cd * pd.u_cd - p.q).cwiseAbs().maxCoeff() / scale);
        ortho = std::max(ortho, (pd.r_cd.transpose() * pd.r_cd - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
        sym = std::max(sym, (pd.u_cd - pd.u_cd.transpose()).cwiseAbs().maxCoeff());
        const oracle::Polar ref = oracle::polar_svd(p.q);
        lam = std::max({lam, std::abs(pd.lambda1 - ref.lambda1), std::abs(pd.lambda2 - ref.lambda2)});
    }
    const double elapsed = seconds_since(start);
    const bool ok = recon <= 1e-9 && ortho <= 1e-9 && sym <= 1e-9 && lam <= 1e-9 && elapsed < 5.0;
    report(2, "polar decomposition", ok,
           fmt("10000 Q: reconstruction %.2g, orthogonality %.2g, symmetry %.2g, |lambda - svd| %.2g (tol 1e-9), "
               "%.2f s (limit 5 s)",
               recon, ortho, sym, lam, elapsed));
}

// Random fleet and a random plan of certified valid deformations.
struct Fleet {
    TriangleConfig t0;
    std::vector<Point2> followers;
    SafetyMargins margins;
    std::vector<TriangleConfig> plan;
};

Fleet random_fleet(std::mt19937_64& rng, const Environment& env) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        Fleet f;
        const double side = 8.0 + 12.0 * u(rng);
        f.t0 = {{Point2{0, 0}, Point2{side, 2.0 * (u(rng) - 0.5)}, Point2{side * (0.2 + 0.6 * u(rng)), side * (0.6 + 0.5 * u(rng))}}};
        const int count = 1 + static_cast<int>(u(rng) * 15.0);  // N = 4..18
        while (static_cast<int>(f.followers.size()) < count) {
            const Point2 p = random_interior(rng, f.t0);
            if (oracle::inside_depth(f.t0, p) < 0.3) continue;
            bool spaced = true;
            for (Point2 q : f.followers) spaced = spaced && distance(p, q) > 0.6;
            if (spaced) f.followers.push_back(p);
        }
        const InitialMargins im = initial_margins(f.t0, f.followers);
        const double eps = (0.15 + 0.7 * u(rng)) * std::min(im.d_s / 2.0, im.d_b);
        const double dm = delta_max(im.d_s, im.d_b, eps);
        f.margins = make_margins(f.t0, f.followers, eps, dm * u(rng));

        std::normal_distribution<double> step(0.0, 0.15 * side);
        f.plan.push_back(f.t0);
        for (int seg = 0; seg < 5; ++seg) {
            for (int attempt = 0; attempt < 200; ++attempt) {
                TriangleConfig next = f.plan.back();
                for (auto& p : next.p) p = p + Point2{step(rng), step(rng)};
                if (valid_deformation(f.t0, next, f.margins, env) &&
                    segment_certified(f.t0, f.plan.back(), next, f.margins, env)) {
                    f.plan.push_back(next);
                    break;
                }
            }
        }
        if (f.plan.size() == 6) return f;
    }
}

void safety_end_to_end() {
    const auto start = Clock::now();
    Environment env;
    env.bounds = {{-1000, -1000}, {1000, 1000}};
    std::mt19937_64 rng(103);
    long pair_violations = 0, containment_violations = 0, samples = 0;
    double tightest = std::numeric_limits<double>::infinity();  // min over samples of slack / epsilon
    for (int trial = 0; trial < 100; ++trial) {
        const Fleet f = random_fleet(rng, env);
        const double eps = f.margins.epsilon;
        const double delta = f.margins.delta;
        const SwarmTrajectory traj(f.plan, 1.0, 10.0, f.followers);
        const std::size_t n = traj.agent_count();
        std::vector<Point2> pos(n);
        const int per_segment = 1000;
        const int total = per_segment * static_cast<int>(f.plan.size() - 1);
        for (int k = 0; k <= total; ++k) {
            const double t = traj.horizon() * k / total;
            const TriangleConfig lead = traj.leaders_at(t);
            for (std::size_t a = 0; a < n; ++a) {
                const DesiredState d = traj.agent_desired(a, t);
                pos[a] = {d.position.x(), d.position.y()};
            }
            ++samples;
            // Worst case: every agent displaced by delta toward its neighbour.
            const double pair = oracle::min_pair_distance(pos) - 2.0 * delta;
            if (pair < 2.0 * eps - 1e-9) ++pair_violations;
            tightest = std::min(tightest, (pair - 2.0 * eps) / eps);
            // Each follower displaced by delta toward the nearest side keeps its
            // epsilon-ball inside the leading triangle.
            for (std::size_t i = 3; i < n; ++i) {
                const double depth = oracle::inside_depth(lead, pos[i]) - delta;
                if (depth < eps - 1e-9) ++containment_violations;
                tightest = std::min(tightest, (depth - eps) / eps);
            }
        }
    }
    const double elapsed = seconds_since(start);
    const bool ok = pair_violations == 0 && containment_violations == 0 && elapsed < 120.0;
    report(3, "safety guarantee end to end", ok,
           fmt("100 fleets, %ld samples: %ld separation and %ld containment violations, tightest slack %.3g eps, "
               "%.1f s (limit 120 s)",
               samples, pair_violations, containment_violations, tightest, elapsed));
}

void astar_optimality() {
    const auto start = Clock::now();
    const TriangleConfig t0{{Point2{0, 0}, Point2{4, 0}, Point2{0, 4}}};
    const std::vector<Point2> followers{{1, 1}};
    const SafetyMargins margins = make_margins(t0, followers, 0.3, 0.05);
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    int scenarios = 0, with_nfz = 0, with_risk = 0, mismatches = 0, invalid = 0;
    double worst_gap = 0.0;
    std::size_t largest = 0;
    for (int k = 0; k < 30; ++k) {
        const double width = 9.0 + 2.0 * (k % 3);
        const double height = 5.0 + 2.0 * ((k / 3) % 2);
        Environment env;
        env.bounds = {{-1, -1}, {width, height}};
        const bool nfz = k % 2 == 1;
        const bool risk = (k / 2) % 2 == 1 || k >= 18;
        if (nfz) {
            // Wall midway between start and goal; a bottom wall needs room past the start's right vertex.
            const double x = (width - 1.0) / 2.0 - 0.25;
            if (width > 9.0 && u(rng) < 0.5) env.nfz.push_back({{x, -1}, {x + 0.5, 0.5 + 1.5 * u(rng)}});
            else env.nfz.push_back({{x, height - 1.5 - 1.5 * u(rng)}, {x + 0.5, height}});
        }
        const int nx = static_cast<int>(width) + 2, ny = static_cast<int>(height) + 2;
        std::vector<double> values(static_cast<std::size_t>(nx * ny), 0.0);
        if (risk) {
            const double gx = u(rng) - 0.5, gy = u(rng) - 0.5;
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) values[j * nx + i] = std::clamp(0.5 + 0.08 * (gx * i + gy * j), 0.0, 1.0);
            }
        }
        env.risk = RiskField({-1, -1}, 1.0, nx, ny, values);

        PlannerConfig cfg;
        cfg.dp_x = 2.0;
        cfg.dp_y = 2.0;
        cfg.dt = 5.0;
        cfg.zeta_h = {10.0 * u(rng), 10.0 * u(rng), 10.0 * u(rng)};
        cfg.risk_cost = k % 4 == 3 ? RiskCost::Exposure : RiskCost::Difference;

        const double shift = width - 5.0;
        TriangleConfig goal{{t0[0] + Point2{shift, 0}, t0[1] + Point2{shift, 0}, t0[2] + Point2{shift, 0}}};
        if (k % 3 == 2) goal[2] = goal[2] + Point2{0, 2};  // deformed goal
        if (!valid_deformation(t0, goal, margins, env)) goal[2] = t0[2] + Point2{shift, 0};

        const std::size_t reachable = oracle::reachable_count(t0, cfg, margins, env, 10000);
        largest = std::max(largest, reachable);
        if (reachable > 10000) continue;
        const oracle::DijkstraResult ref = oracle::dijkstra(t0, goal, cfg, margins, env);
        if (!ref.found) continue;
        ++scenarios;
        with_nfz += nfz;
        with_risk += risk;
        const LeaderPlan plan = astar(t0, goal, cfg, margins, env);
        const double gap = std::abs(plan.cost - ref.cost);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-9) ++mismatches;
        for (std::size_t w = 1; w < plan.waypoints.size(); ++w) {
            if (!valid_deformation(t0, plan.waypoints[w], margins, env)) ++invalid;
        }
    }
    const double elapsed = seconds_since(start);
    const bool ok = scenarios >= 20 && with_nfz > 0 && with_risk > 0 && mismatches == 0 && invalid == 0 &&
                    elapsed < 60.0;
    report(4, "A* optimality", ok,
           fmt("%d scenarios (%d with no-fly zones, %d with risk gradients, <= %zu reachable configurations): "
               "max |A* - Dijkstra| = %.3g (tol 1e-9), %d invalid waypoints, %.1f s (limit 60 s)",
               scenarios, with_nfz, with_risk, largest, worst_gap, invalid, elapsed));
}

void quintic_trajectory(const Mission& case1) {
    Eigen::Matrix<double, 6, 6> m;
    m << 0, 0, 0, 0, 0, 1,   //
        0, 0, 0, 0, 1, 0,    //
        0, 0, 0, 2, 0, 0,    //
        1, 1, 1, 1, 1, 1,    //
        5, 4, 3, 2, 1, 0,    //
        20, 12, 6, 2, 0, 0;  // beta, beta', beta'' at tau = 0 and tau = 1
    Eigen::Matrix<double, 6, 1> rhs;
    rhs << 0, 0, 0, 1, 0, 0;
    const Eigen::Matrix<double, 6, 1> a = m.colPivHouseholderQr().solve(rhs);
    const QuinticSegment seg = quintic_coeffs(1.0);
    double coeff_err = 0.0;
    const std::array<double, 6> expected{6, -15, 10, 0, 0, 0};
    for (int i = 0; i < 6; ++i) coeff_err = std::max({coeff_err, std::abs(seg.a[i] - a(i)), std::abs(seg.a[i] - expected[i])});

    const SwarmTrajectory traj = mission_trajectory(case1.scenario, case1.plan);
    double jump = 0.0;
    const double h = 1e-4;
    for (std::size_t k = 1; k + 1 < case1.plan.waypoints.size(); ++k) {
        const double t = traj.dt() * static_cast<double>(k);
        for (std::size_t ag = 0; ag < traj.agent_count(); ++ag) {
            const DesiredState at = traj.agent_desired(ag, t);
            const DesiredState b1 = traj.agent_desired(ag, t - h), b2 = traj.agent_desired(ag, t - 2 * h);
            const DesiredState f1 = traj.agent_desired(ag, t + h), f2 = traj.agent_desired(ag, t + 2 * h);
            // Position from both sides, then second-order one-sided differences of position and velocity.
            const DesiredState lo = traj.agent_desired(ag, t - 1e-9), hi = traj.agent_desired(ag, t + 1e-9);
            jump = std::max(jump, (lo.position - hi.position).norm());
            const Eigen::Vector3d vb = (3 * at.position - 4 * b1.position + b2.position) / (2 * h);
            const Eigen::Vector3d vf = (-3 * at.position + 4 * f1.position - f2.position) / (2 * h);
            const Eigen::Vector3d ab = (3 * at.velocity - 4 * b1.velocity + b2.velocity) / (2 * h);
            const Eigen::Vector3d af = (-3 * at.velocity + 4 * f1.velocity - f2.velocity) / (2 * h);
            jump = std::max({jump, (vb - vf).norm(), (ab - af).norm()});
        }
    }
    const bool ok = coeff_err <= 1e-12 && jump < 1e-6;
    report(5, "quintic trajectory", ok,
           fmt("dt = 1 coefficients off by %.2g from (6, -15, 10, 0, 0, 0) and the 6x6 solve; max junction "
               "mismatch %.3g over %zu junctions x %zu agents (tol 1e-6)",
               coeff_err, jump, case1.plan.waypoints.size() - 2, traj.agent_count()));
}

void closed_loop_tracking(const Mission& case1) {
    const auto start = Clock::now();
    const SimLog log = simulate_mission(case1.scenario, case1.plan);
    const double elapsed = seconds_since(start);
    const SafetyMargins margins = scenario_margins(case1.scenario);
    const AuditReport r = audit(log, margins);
    const bool ok = log.uav_count == 18 && r.completed && r.max_deviation_after_transient <= 0.1 &&
                    r.nfz_hits == 0 && r.min_pair_distance >= 2.0 * margins.epsilon &&
                    case1.scenario.sim.step == 0.01 && elapsed < 60.0;
    report(6, "closed-loop tracking", ok,
           fmt("case1, %zu UAVs, h = %.3g s: max deviation after %.0f s = %.4f m (limit 0.1), NFZ hits %ld, "
               "min separation %.3f m (>= %.1f), sim %.1f s (limit 60 s), plan %.1f s",
               log.uav_count, case1.scenario.sim.step, log.transient, r.max_deviation_after_transient, r.nfz_hits,
               r.min_pair_distance, 2.0 * margins.epsilon, elapsed, case1.plan_seconds));
}

void case2_rigid_phase(const Mission& case2) {
    const Scenario& s = case2.scenario;
    const SwarmTrajectory traj = mission_trajectory(s, case2.plan);
    const SafetyMargins margins = scenario_margins(s);

    // The rigid phase is the leading run of plan segments that move all leaders equally.
    const auto& w = case2.plan.waypoints;
    std::size_t rigid_segments = 0;
    while (rigid_segments + 1 < w.size()) {
        const Point2 v = w[rigid_segments + 1][0] - w[rigid_segments][0];
        bool same = true;
        for (std::size_t l = 1; l < 3; ++l) same = same && (w[rigid_segments + 1][l] - w[rigid_segments][l]) == v;
        if (!same) break;
        ++rigid_segments;
    }
    const double phase_end = traj.dt() * static_cast<double>(rigid_segments);

    const auto series = deformation_series(traj, s.sim.step, margins.lambda_cd_min);
    double rigid_dev = 0.0, later_dev = 0.0;
    for (const auto& d : series) {
        const double dev = std::max(std::abs(d.lambda1 - 1.0), std::abs(d.lambda2 - 1.0));
        if (d.t <= phase_end) rigid_dev = std::max(rigid_dev, dev);
        else later_dev = std::max(later_dev, dev);
    }
    std::filesystem::create_directories(kArtifacts);
    const auto svg = kArtifacts / "case2_eigenvalues.svg";
    std::ofstream(svg) << eigenvalue_svg(series, "case2: stretches of the pure deformation");
    const bool emitted = std::filesystem::file_size(svg) > 0;

    const bool walker_marked = !s.env.walkers.empty() && s.planner.walker_risk == WalkerRisk::Corridor &&
                               corridor_probability(s.env, s.env.walkers[0].start) > 0.5;
    const bool ok = walker_marked && rigid_segments > 0 && rigid_dev <= 1e-6 && later_dev > 1e-6 && emitted;
    report(7, "case2 rigid phase", ok,
           fmt("rigid phase 0-%.0f s (%zu of %zu segments), max |lambda - 1| = %.2g in phase (tol 1e-6), %.3f after; "
               "eigenvalue plot %s",
               phase_end, rigid_segments, w.size() - 1, rigid_dev, later_dev, svg.string().c_str()));
}

void hover_equilibrium() {
    const VehicleParams p;
    const Gains g;
    double worst_input = 0.0;
    for (const Eigen::Vector3d& at : {Eigen::Vector3d(0, 0, 10), Eigen::Vector3d(50, 20, 10), Eigen::Vector3d(-3, 7, 2)}) {
        DesiredState d;
        d.position = at;
        const ControlInput u = control_step(QuadState::hover_at(at, p.g), d, {}, g, p);
        worst_input = std::max({worst_input, std::abs(u.u_thrust), std::abs(u.u_phi), std::abs(u.u_theta),
                                std::abs(u.u_psi)});
    }

    // Ballistic reference: z(t) = z0 + v0 t - g t^2 / 2.
    double worst_fall = 0.0;
    QuadState s;
    s.position = {1, 2, 100};
    s.velocity = {0.5, -0.25, 3.0};
    const QuadState s0 = s;
    const double h = 0.5;
    for (int k = 1; k <= 20; ++k) {
        s = integrate_step(s, {}, h, p);
        const double t = h * k;
        const Eigen::Vector3d exact = s0.position + t * s0.velocity - Eigen::Vector3d(0, 0, 0.5 * p.g * t * t);
        const Eigen::Vector3d vexact = s0.velocity - Eigen::Vector3d(0, 0, p.g * t);
        worst_fall = std::max({worst_fall, (s.position - exact).cwiseAbs().maxCoeff() / std::max(1.0, exact.norm()),
                               (s.velocity - vexact).cwiseAbs().maxCoeff() / std::max(1.0, vexact.norm())});
    }
    // Machine precision: a few ulps of accumulated rounding over 20 steps.
    const double ulp_budget = 64 * std::numeric_limits<double>::epsilon();
    const bool ok = worst_input <= 1e-12 && worst_fall <= ulp_budget;
    report(8, "hover equilibrium", ok,
           fmt("max |input| at hover %.2g (tol 1e-12); free-fall relative error %.2g after 20 RK4 steps "
               "(budget %.2g)",
               worst_input, worst_fall, ulp_budget));
}

}  // namespace

int main() {
    criterion(1, "homogeneous map", homogeneous_map);
    criterion(2, "polar decomposition", polar_decomposition);
    criterion(3, "safety guarantee end to end", safety_end_to_end);
    criterion(4, "A* optimality", astar_optimality);

    std::optional<Mission> case1;
    try {
        case1 = plan_bundled("case1.json");
    } catch (const std::exception& e) {
        std::printf("case1 planning failed: %s\n", e.what());
    }
    if (case1) {
        criterion(5, "quintic trajectory", [&] { quintic_trajectory(*case1); });
        criterion(6, "closed-loop tracking", [&] { closed_loop_tracking(*case1); });
    } else {
        report(5, "quintic trajectory", false, "case1 plan unavailable");
        report(6, "closed-loop tracking", false, "case1 plan unavailable");
    }
    criterion(7, "case2 rigid phase", [] { case2_rigid_phase(plan_bundled("case2.json")); });
    criterion(8, "hover equilibrium", hover_equilibrium);

    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}
