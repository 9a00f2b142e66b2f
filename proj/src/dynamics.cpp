#include "cdswarm/dynamics.hpp"

#include <cmath>

#include "cdswarm/errors.hpp"

namespace cdswarm {

namespace {

QuadState axpy(const QuadState& s, double h, const QuadStateDerivative& d) {
    QuadState out;
    out.position = s.position + h * d.position;
    out.velocity = s.velocity + h * d.velocity;
    out.thrust = s.thrust + h * d.thrust;
    out.euler = s.euler + h * d.euler;
    out.thrust_rate = s.thrust_rate + h * d.thrust_rate;
    out.euler_rate = s.euler_rate + h * d.euler_rate;
    return out;
}

}  // namespace

bool QuadState::finite() const {
    return position.allFinite() && velocity.allFinite() && std::isfinite(thrust) && euler.allFinite() &&
           std::isfinite(thrust_rate) && euler_rate.allFinite();
}

Eigen::Matrix3d rotation_matrix(double phi, double theta, double psi) {
    const double cf = std::cos(phi), sf = std::sin(phi);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(psi), sp = std::sin(psi);
    Eigen::Matrix3d r;
    r << ct * cp, ct * sp, -st,
         sf * st * cp - cf * sp, sf * st * sp + cf * cp, sf * ct,
         cf * st * cp + sf * sp, cf * st * sp - sf * cp, cf * ct;
    return r;
}

Eigen::Vector3d thrust_axis(double phi, double theta, double psi) {
    const double cf = std::cos(phi), sf = std::sin(phi);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(psi), sp = std::sin(psi);
    return {cf * st * cp + sf * sp, cf * st * sp - sf * cp, cf * ct};
}

QuadStateDerivative state_derivative(const QuadState& s, const ControlInput& u, const VehicleParams& params) {
    QuadStateDerivative d;
    d.position = s.velocity;
    d.velocity = s.thrust * thrust_axis(s.euler.x(), s.euler.y(), s.euler.z());
    d.velocity.z() -= params.g;
    d.thrust = s.thrust_rate;
    d.euler = s.euler_rate;
    d.thrust_rate = u.u_thrust;
    d.euler_rate = {u.u_phi, u.u_theta, u.u_psi};
    return d;
}

QuadState integrate_step(const QuadState& s, const ControlInput& u, double h, const VehicleParams& params) {
    const QuadStateDerivative k1 = state_derivative(s, u, params);
    const QuadStateDerivative k2 = state_derivative(axpy(s, 0.5 * h, k1), u, params);
    const QuadStateDerivative k3 = state_derivative(axpy(s, 0.5 * h, k2), u, params);
    const QuadStateDerivative k4 = state_derivative(axpy(s, h, k3), u, params);

    QuadState out = s;
    const double w = h / 6.0;
    out.position += w * (k1.position + 2 * k2.position + 2 * k3.position + k4.position);
    out.velocity += w * (k1.velocity + 2 * k2.velocity + 2 * k3.velocity + k4.velocity);
    out.thrust += w * (k1.thrust + 2 * k2.thrust + 2 * k3.thrust + k4.thrust);
    out.euler += w * (k1.euler + 2 * k2.euler + 2 * k3.euler + k4.euler);
    out.thrust_rate += w * (k1.thrust_rate + 2 * k2.thrust_rate + 2 * k3.thrust_rate + k4.thrust_rate);
    out.euler_rate += w * (k1.euler_rate + 2 * k2.euler_rate + 2 * k3.euler_rate + k4.euler_rate);
    if (!out.finite()) throw Error(ErrorCode::NonFiniteState, "RK4 step produced a non-finite state");
    return out;
}

}  // namespace cdswarm
