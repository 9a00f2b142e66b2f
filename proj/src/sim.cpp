#include "cdswarm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace cdswarm {

namespace {

constexpr double kGimbalLimit = 0.5 * std::numbers::pi;

QuadState advance(const QuadState& s, const SwarmTrajectory& traj, std::size_t agent, double t, double h,
                  const Gains& gains, const VehicleParams& params) {
    const DesiredState d = traj.agent_desired(agent, std::min(t, traj.horizon()));
    const ControlInput u = control_step(s, d, YawReference{}, gains, params);
    QuadState next = integrate_step(s, u, h, params);
    if (!(std::abs(next.euler.y()) < kGimbalLimit)) {
        std::ostringstream msg;
        msg << "UAV " << agent << " pitch reached " << next.euler.y() << " rad";
        throw Error(ErrorCode::GimbalLock, msg.str());
    }
    return next;
}

Point2 planar(const Eigen::Vector3d& v) { return {v.x(), v.y()}; }

Point2 clamp_to(const Rect& r, Point2 p) {
    return {std::clamp(p.x, r.min.x, r.max.x), std::clamp(p.y, r.min.y, r.max.y)};
}

}  // namespace

void validate(const SimConfig& cfg) {
    if (!(cfg.step > 0.0) || !(cfg.duration >= 0.0) || cfg.record_decimation < 1 || !(cfg.transient >= 0.0)) {
        throw Error(ErrorCode::ValidationError,
                    "sim needs step > 0, duration >= 0, record_decimation >= 1 and transient >= 0");
    }
}

void step_fleet_serial(FleetState& fleet, const SwarmTrajectory& traj, double t, double h, const Gains& gains,
                       const VehicleParams& params) {
    for (std::size_t i = 0; i < fleet.uavs.size(); ++i) {
        fleet.uavs[i] = advance(fleet.uavs[i], traj, i, t, h, gains, params);
    }
}

void step_fleet(FleetState& fleet, const SwarmTrajectory& traj, double t, double h, const Gains& gains,
                const VehicleParams& params) {
    const auto n = static_cast<std::int64_t>(fleet.uavs.size());
    std::vector<std::optional<Error>> failures(fleet.uavs.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            fleet.uavs[i] = advance(fleet.uavs[i], traj, static_cast<std::size_t>(i), t, h, gains, params);
        } catch (const Error& e) {
            failures[i] = e;
        }
    }
    // Report the lowest-index failure so the diagnostic is thread-count independent.
    for (auto& f : failures) {
        if (f) throw *f;
    }
}

FleetState initial_fleet(const SwarmTrajectory& traj, const SafetyMargins& margins, const SimConfig& cfg,
                         const VehicleParams& params) {
    FleetState fleet;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < traj.agent_count(); ++i) {
        QuadState s = QuadState::hover_at(traj.agent_desired(i, 0.0).position, params.g);
        if (cfg.perturb_initial) {
            const double radius = 0.5 * margins.delta * unit(rng);
            const double angle = 2.0 * std::numbers::pi * unit(rng);
            s.position.x() += radius * std::cos(angle);
            s.position.y() += radius * std::sin(angle);
        }
        fleet.uavs.push_back(s);
    }
    return fleet;
}

SimLog run(const SwarmTrajectory& traj, const Environment& env, const SafetyMargins& margins,
           const Gains& gains, const VehicleParams& params, const SimConfig& cfg) {
    validate(cfg);
    validate(gains);
    const double duration = cfg.duration > 0.0 ? cfg.duration : traj.horizon();
    const auto steps = static_cast<long>(std::llround(duration / cfg.step));
    const std::size_t n = traj.agent_count();

    SimLog log;
    log.uav_count = n;
    log.step = cfg.step;
    log.transient = cfg.transient;
    log.exposure.assign(n, 0.0);
    log.extrema.min_pair_distance = std::numeric_limits<double>::infinity();
    log.extrema.max_c_col = -std::numeric_limits<double>::infinity();

    FleetState fleet = initial_fleet(traj, margins, cfg, params);
    std::vector<UavSample> snapshot(n);

    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * cfg.step;
        const double t_ref = std::min(t, traj.horizon());

        FleetSample fs;
        fs.t = t;
        fs.min_pair_distance = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            UavSample& u = snapshot[i];
            u.actual = fleet.uavs[i].position;
            u.desired = traj.agent_desired(i, t_ref).position;
            u.deviation = (u.actual - u.desired).norm();
            fs.max_deviation = std::max(fs.max_deviation, u.deviation);
            for (std::size_t j = 0; j < i; ++j) {
                fs.min_pair_distance = std::min(fs.min_pair_distance, (u.actual - snapshot[j].actual).norm());
            }
            const Point2 p = planar(u.actual);
            if (std::any_of(env.nfz.begin(), env.nfz.end(),
                            [&](const Rect& z) { return point_rect_distance(p, z) < margins.epsilon; })) {
                ++fs.nfz_hits;
            }
        }
        try {
            const PolarDecomp pd = polar_decompose(solve_deformation(traj.initial(), traj.leaders_at(t_ref)));
            fs.lambda1 = pd.lambda1;
            fs.lambda2 = pd.lambda2;
            fs.c_col = collision_constraint(pd, margins.lambda_cd_min);
        } catch (const Error&) {
            fs.lambda1 = 0.0;
            fs.c_col = std::numeric_limits<double>::infinity();
        }

        FullRateExtrema& ex = log.extrema;
        ex.max_deviation = std::max(ex.max_deviation, fs.max_deviation);
        if (t >= cfg.transient) ex.max_deviation_after_transient = std::max(ex.max_deviation_after_transient, fs.max_deviation);
        ex.min_pair_distance = std::min(ex.min_pair_distance, fs.min_pair_distance);
        ex.max_c_col = std::max(ex.max_c_col, fs.c_col);
        if (fs.nfz_hits > 0) ++ex.nfz_hit_steps;

        if (k % cfg.record_decimation == 0) {
            log.fleet.push_back(fs);
            log.uavs.insert(log.uavs.end(), snapshot.begin(), snapshot.end());
        }
        if (k == steps) break;

        for (std::size_t i = 0; i < n; ++i) {
            log.exposure[i] += cfg.step * human_probability(env, clamp_to(env.bounds, planar(snapshot[i].actual)), t);
        }
        try {
            step_fleet(fleet, traj, t, cfg.step, gains, params);
        } catch (const Error& e) {
            log.abort_code = e.code();
            log.abort_reason = e.what();
            break;
        }
    }
    return log;
}

AuditReport audit(const SimLog& log, const SafetyMargins& margins) {
    AuditReport r;
    r.completed = log.completed();
    r.max_deviation = log.extrema.max_deviation;
    r.max_deviation_after_transient = log.extrema.max_deviation_after_transient;
    r.min_pair_distance = log.extrema.min_pair_distance;
    r.max_c_col = log.extrema.max_c_col;
    r.nfz_hits = log.extrema.nfz_hit_steps;
    r.exposure = log.exposure;

    // Recorded samples are re-scanned so edited or externally loaded logs are judged too.
    for (std::size_t s = 0; s < log.fleet.size(); ++s) {
        const FleetSample& fs = log.fleet[s];
        double dev = 0.0;
        for (std::size_t i = 0; i < log.uav_count; ++i) dev = std::max(dev, log.at(s, i).deviation);
        r.max_deviation = std::max(r.max_deviation, dev);
        if (fs.t >= log.transient) r.max_deviation_after_transient = std::max(r.max_deviation_after_transient, dev);
        r.min_pair_distance = std::min(r.min_pair_distance, fs.min_pair_distance);
        r.max_c_col = std::max(r.max_c_col, fs.c_col);
    }
    if (r.nfz_hits == 0) {
        for (const FleetSample& fs : log.fleet) r.nfz_hits += fs.nfz_hits > 0 ? 1 : 0;
    }

    r.hypothesis_ok = r.max_deviation <= margins.delta;
    r.tracking_ok = r.max_deviation_after_transient <= margins.delta;
    r.separation_ok = r.min_pair_distance >= 2.0 * margins.epsilon;
    r.certificate_ok = r.max_c_col <= kCertificateTolerance;
    return r;
}

namespace {

void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

void write_uav_csv(std::ostream& os, const SimLog& log) {
    os << "t_s,uav,x_m,y_m,z_m,x_des_m,y_des_m,z_des_m,deviation_m\n";
    for (std::size_t s = 0; s < log.fleet.size(); ++s) {
        for (std::size_t i = 0; i < log.uav_count; ++i) {
            const UavSample& u = log.at(s, i);
            put(os, log.fleet[s].t);
            os << ',' << i;
            for (double v : {u.actual.x(), u.actual.y(), u.actual.z(), u.desired.x(), u.desired.y(), u.desired.z(),
                             u.deviation}) {
                os << ',';
                put(os, v);
            }
            os << '\n';
        }
    }
}

void write_fleet_csv(std::ostream& os, const SimLog& log) {
    os << "t_s,min_pair_distance_m,lambda1,lambda2,c_col,nfz_hits,max_deviation_m\n";
    for (const FleetSample& fs : log.fleet) {
        put(os, fs.t);
        for (double v : {fs.min_pair_distance, fs.lambda1, fs.lambda2, fs.c_col}) {
            os << ',';
            put(os, v);
        }
        os << ',' << fs.nfz_hits << ',';
        put(os, fs.max_deviation);
        os << '\n';
    }
}

}  // namespace cdswarm
