#pragma once

// Closed-loop mission executor and safety audit.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cdswarm/control.hpp"
#include "cdswarm/dynamics.hpp"
#include "cdswarm/environment.hpp"
#include "cdswarm/errors.hpp"
#include "cdswarm/safety.hpp"
#include "cdswarm/trajectory.hpp"

namespace cdswarm {

struct SimConfig {
    double step = 0.01;          // s
    double duration = 0.0;       // s; 0 means the trajectory horizon
    int record_decimation = 1;   // keep every n-th step
    std::uint64_t seed = 1;
    bool perturb_initial = false;  // uniform offset of at most delta / 2
    double transient = 2.0;        // s excluded from the tracking-bound check
};

void validate(const SimConfig& cfg);

struct UavSample {
    Eigen::Vector3d actual = Eigen::Vector3d::Zero();
    Eigen::Vector3d desired = Eigen::Vector3d::Zero();
    double deviation = 0.0;
};

struct FleetSample {
    double t = 0.0;
    double min_pair_distance = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double c_col = 0.0;
    int nfz_hits = 0;  // UAVs whose epsilon-ball enters a no-fly zone
    double max_deviation = 0.0;
};

// Extremes over every integration step, independent of decimation.
struct FullRateExtrema {
    double max_deviation = 0.0;
    double max_deviation_after_transient = 0.0;
    double min_pair_distance = 0.0;
    double max_c_col = 0.0;
    long nfz_hit_steps = 0;
};

struct SimLog {
    std::size_t uav_count = 0;
    double step = 0.0;
    double transient = 0.0;
    std::vector<FleetSample> fleet;  // one per recorded instant
    std::vector<UavSample> uavs;     // fleet.size() * uav_count, row-major by instant
    std::vector<double> exposure;    // integral of Pr(Human) dt per UAV
    FullRateExtrema extrema;
    std::optional<ErrorCode> abort_code;
    std::string abort_reason;

    const UavSample& at(std::size_t sample, std::size_t uav) const { return uavs[sample * uav_count + uav]; }
    bool completed() const { return !abort_code.has_value(); }
};

struct AuditReport {
    double max_deviation = 0.0;
    double max_deviation_after_transient = 0.0;
    bool tracking_ok = false;    // deviation <= delta after the transient
    bool hypothesis_ok = false;  // deviation <= delta over the whole run
    double min_pair_distance = 0.0;
    bool separation_ok = false;  // >= 2 epsilon
    double max_c_col = 0.0;
    bool certificate_ok = false;  // C_Col <= tolerance at every sample
    long nfz_hits = 0;
    std::vector<double> exposure;
    bool completed = false;

    bool passed() const { return completed && tracking_ok && separation_ok && certificate_ok && nfz_hits == 0; }
};

// Closed-loop state of the whole fleet at one instant.
struct FleetState {
    std::vector<QuadState> uavs;
};

/// Advances every UAV by one step against the desired trajectory at time t.
/// The OpenMP version and the serial reference produce identical states.
void step_fleet(FleetState& fleet, const SwarmTrajectory& traj, double t, double h, const Gains& gains,
                const VehicleParams& params);
void step_fleet_serial(FleetState& fleet, const SwarmTrajectory& traj, double t, double h, const Gains& gains,
                       const VehicleParams& params);

/// Initial states: hovering at the desired start, optionally perturbed.
FleetState initial_fleet(const SwarmTrajectory& traj, const SafetyMargins& margins, const SimConfig& cfg,
                         const VehicleParams& params);

/// Runs the mission. NonFiniteState / GimbalLock / ThrustSingularity abort the
/// run; the partial log carries the code and a diagnostic.
SimLog run(const SwarmTrajectory& traj, const Environment& env, const SafetyMargins& margins,
           const Gains& gains, const VehicleParams& params, const SimConfig& cfg);

AuditReport audit(const SimLog& log, const SafetyMargins& margins);

// CSV emitters; column layout documented in the README.
void write_uav_csv(std::ostream& os, const SimLog& log);
void write_fleet_csv(std::ostream& os, const SimLog& log);

}  // namespace cdswarm
