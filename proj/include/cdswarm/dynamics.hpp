#pragma once

// 14-state quadcopter model in thrust-per-mass form. Thrust and the three
// Euler angles are double integrators driven by the control input; the
// translational dynamics see gravity plus thrust along the body k axis.

#include <optional>

#include <Eigen/Core>

namespace cdswarm {

inline constexpr double kGravity = 9.81;  // m/s^2

struct QuadState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    double thrust = 0.0;                                  // F_T / m, m/s^2
    Eigen::Vector3d euler = Eigen::Vector3d::Zero();      // phi, theta, psi
    double thrust_rate = 0.0;                             // m/s^3
    Eigen::Vector3d euler_rate = Eigen::Vector3d::Zero();

    static QuadState hover_at(const Eigen::Vector3d& p, double g = kGravity) {
        QuadState s;
        s.position = p;
        s.thrust = g;
        return s;
    }

    bool finite() const;
};

// d/dt of a QuadState shares its layout.
using QuadStateDerivative = QuadState;

struct ControlInput {
    double u_thrust = 0.0;  // m/s^4
    double u_phi = 0.0;     // rad/s^2
    double u_theta = 0.0;
    double u_psi = 0.0;
};

struct InputLimits {
    double thrust = 0.0;  // |u_T| bound, 0 disables
    double angular = 0.0; // |u_phi|, |u_theta|, |u_psi| bound, 0 disables
};

struct VehicleParams {
    double g = kGravity;
    std::optional<InputLimits> saturation;
};

/// Rows are the body axes i_b, j_b, k_b in ground coordinates.
Eigen::Matrix3d rotation_matrix(double phi, double theta, double psi);

/// Unit thrust direction k_b (third row of rotation_matrix).
Eigen::Vector3d thrust_axis(double phi, double theta, double psi);

QuadStateDerivative state_derivative(const QuadState& s, const ControlInput& u, const VehicleParams& params);

/// Classical RK4 with the input held over the step. Throws NonFiniteState.
QuadState integrate_step(const QuadState& s, const ControlInput& u, double h, const VehicleParams& params);

}  // namespace cdswarm
