#include "cdswarm/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdswarm/errors.hpp"

namespace cdswarm {

namespace {

constexpr double kThrustTolerance = 1e-9;

double clamp_abs(double v, double limit) { return limit > 0.0 ? std::clamp(v, -limit, limit) : v; }

}  // namespace

void validate(const Gains& g) {
    const double all[] = {g.gamma1, g.gamma2, g.k_thrust, g.k_thrust_rate, g.k_phi,
                          g.k_phi_rate, g.k_theta, g.k_theta_rate, g.k_psi, g.k_psi_rate};
    for (double v : all) {
        if (!(v > 0.0)) throw Error(ErrorCode::ValidationError, "controller gains must be strictly positive");
    }
}

Eigen::Vector3d outer_loop(const QuadState& state, const DesiredState& desired, const Gains& gains) {
    return desired.acceleration + gains.gamma1 * (desired.velocity - state.velocity) +
           gains.gamma2 * (desired.position - state.position);
}

Setpoints extract_setpoints(const Eigen::Vector3d& u, double psi, const VehicleParams& params) {
    const Eigen::Vector3d w = u + Eigen::Vector3d(0.0, 0.0, params.g);
    const double norm = w.norm();
    if (!(norm > kThrustTolerance) || !(w.z() > 0.0)) {
        std::ostringstream msg;
        msg << "commanded specific force (" << w.x() << ", " << w.y() << ", " << w.z()
            << ") cannot be produced by upward thrust";
        throw Error(ErrorCode::ThrustSingularity, msg.str());
    }
    const double cp = std::cos(psi), sp = std::sin(psi);
    Setpoints out;
    out.thrust = norm;
    // k_b . (S_psi, -C_psi, 0) = S_phi and k_b . (C_psi, S_psi, 0) = C_phi S_theta.
    out.phi = std::asin(std::clamp((w.x() * sp - w.y() * cp) / norm, -1.0, 1.0));
    out.theta = std::atan2(w.x() * cp + w.y() * sp, w.z());
    return out;
}

ControlInput inner_loop(const QuadState& s, const Setpoints& sp, const Gains& g) {
    ControlInput out;
    out.u_thrust = -g.k_thrust_rate * s.thrust_rate + g.k_thrust * (sp.thrust - s.thrust);
    out.u_phi = -g.k_phi_rate * s.euler_rate.x() + g.k_phi * (sp.phi - s.euler.x());
    out.u_theta = -g.k_theta_rate * s.euler_rate.y() + g.k_theta * (sp.theta - s.euler.y());
    return out;
}

double yaw_control(const QuadState& s, const YawReference& ref, const Gains& g) {
    return ref.psi_accel + g.k_psi_rate * (ref.psi_rate - s.euler_rate.z()) + g.k_psi * (ref.psi - s.euler.z());
}

ControlInput control_step(const QuadState& state, const DesiredState& desired, const YawReference& yaw,
                          const Gains& gains, const VehicleParams& params) {
    const Eigen::Vector3d u = outer_loop(state, desired, gains);
    const Setpoints sp = extract_setpoints(u, state.euler.z(), params);
    ControlInput out = inner_loop(state, sp, gains);
    out.u_psi = yaw_control(state, yaw, gains);
    if (params.saturation) {
        out.u_thrust = clamp_abs(out.u_thrust, params.saturation->thrust);
        out.u_phi = clamp_abs(out.u_phi, params.saturation->angular);
        out.u_theta = clamp_abs(out.u_theta, params.saturation->angular);
        out.u_psi = clamp_abs(out.u_psi, params.saturation->angular);
    }
    return out;
}

}  // namespace cdswarm
