#pragma once

// Cascaded flight controller: translational outer loop -> thrust/attitude
// setpoints -> PD inner loop on the actuator channels, plus yaw tracking.

#include <Eigen/Core>

#include "cdswarm/dynamics.hpp"
#include "cdswarm/trajectory.hpp"

namespace cdswarm {

struct Gains {
    double gamma1 = 2.0;  // 1/s
    double gamma2 = 1.0;  // 1/s^2
    double k_thrust = 25.0;
    double k_thrust_rate = 10.0;
    double k_phi = 25.0;
    double k_phi_rate = 10.0;
    double k_theta = 25.0;
    double k_theta_rate = 10.0;
    double k_psi = 25.0;
    double k_psi_rate = 10.0;
};

/// Throws ValidationError unless every gain is strictly positive.
void validate(const Gains& gains);

struct Setpoints {
    double thrust = kGravity;  // m/s^2
    double phi = 0.0;
    double theta = 0.0;
};

struct YawReference {
    double psi = 0.0;
    double psi_rate = 0.0;
    double psi_accel = 0.0;
};

/// Fictitious acceleration U = r''_d + gamma1 (r'_d - r') + gamma2 (r_d - r).
Eigen::Vector3d outer_loop(const QuadState& state, const DesiredState& desired, const Gains& gains);

/// Thrust and roll/pitch that realise U' = U + g e3. Throws ThrustSingularity
/// when |U'| is ~0 or its vertical component is not positive.
Setpoints extract_setpoints(const Eigen::Vector3d& u, double psi, const VehicleParams& params);

/// PD laws on (thrust, phi, theta). Returned as a ControlInput with u_psi = 0.
ControlInput inner_loop(const QuadState& state, const Setpoints& sp, const Gains& gains);

double yaw_control(const QuadState& state, const YawReference& ref, const Gains& gains);

/// Full cascade; applies params.saturation last when present.
ControlInput control_step(const QuadState& state, const DesiredState& desired, const YawReference& yaw,
                          const Gains& gains, const VehicleParams& params);

}  // namespace cdswarm
