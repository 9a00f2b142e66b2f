#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "doctest.h"

#include "cdswarm/dynamics.hpp"
#include "cdswarm/errors.hpp"

using namespace cdswarm;
using doctest::Approx;

namespace {

// Ground-to-body map as the transpose of the active Z-Y-X rotation.
Eigen::Matrix3d rotation_oracle(double phi, double theta, double psi) {
    const Eigen::Matrix3d active = (Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitZ()) *
                                    Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()) *
                                    Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitX()))
                                       .toRotationMatrix();
    return active.transpose();
}

QuadState run(QuadState s, const ControlInput& u, double h, double t_end, const VehicleParams& p) {
    const int steps = static_cast<int>(std::lround(t_end / h));
    for (int k = 0; k < steps; ++k) s = integrate_step(s, u, h, p);
    return s;
}

double state_gap(const QuadState& a, const QuadState& b) {
    return (a.position - b.position).norm() + (a.velocity - b.velocity).norm() + (a.euler - b.euler).norm() +
           std::abs(a.thrust - b.thrust);
}

}  // namespace

TEST_CASE("rotation_matrix examples") {
    CHECK(rotation_matrix(0, 0, 0).isApprox(Eigen::Matrix3d::Identity(), 1e-15));
    const Eigen::Matrix3d yaw = rotation_matrix(0, 0, std::numbers::pi / 2);
    CHECK(yaw(0, 0) == Approx(0.0).scale(1));
    CHECK(yaw(0, 1) == Approx(1.0));
    CHECK(yaw(0, 2) == Approx(0.0).scale(1));
}

TEST_CASE("rotation_matrix is orthonormal and matches composed elementary rotations") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 500; ++k) {
        const double phi = u(rng), theta = 0.5 * u(rng), psi = u(rng);
        const Eigen::Matrix3d r = rotation_matrix(phi, theta, psi);
        CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((r - rotation_oracle(phi, theta, psi)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((thrust_axis(phi, theta, psi) - r.row(2).transpose()).norm() < 1e-15);
    }
}

TEST_CASE("state_derivative at hover and in free fall") {
    const VehicleParams p;
    const QuadState hover = QuadState::hover_at({1, 2, 10});
    const QuadStateDerivative d = state_derivative(hover, {}, p);
    CHECK(d.position.norm() == 0.0);
    CHECK(d.velocity.norm() < 1e-15);
    CHECK(d.thrust == 0.0);
    CHECK(d.euler.norm() == 0.0);
    CHECK(d.thrust_rate == 0.0);
    CHECK(d.euler_rate.norm() == 0.0);

    QuadState fall = hover;
    fall.thrust = 0.0;
    fall.euler = {0.3, -0.2, 1.0};
    const QuadStateDerivative f = state_derivative(fall, {}, p);
    CHECK(f.velocity.x() == 0.0);
    CHECK(f.velocity.y() == 0.0);
    CHECK(f.velocity.z() == Approx(-9.81));
}

TEST_CASE("small pitch tilts thrust toward +x") {
    const VehicleParams p;
    for (double theta : {1e-3, 1e-2, 5e-2}) {
        QuadState s = QuadState::hover_at({0, 0, 10});
        s.euler.y() = theta;
        const QuadStateDerivative d = state_derivative(s, {}, p);
        CHECK(d.velocity.x() == Approx(p.g * std::sin(theta)).epsilon(1e-12));
        // Small-angle expansion g theta is accurate to O(theta^3).
        CHECK(std::abs(d.velocity.x() - p.g * theta) <= p.g * theta * theta * theta / 6 + 1e-15);
    }
}

TEST_CASE("integrate_step keeps equilibrium and is exact for free fall") {
    const VehicleParams p;
    const QuadState hover = QuadState::hover_at({3, 4, 10});
    for (double h : {0.001, 0.01, 0.5}) {
        const QuadState next = integrate_step(hover, {}, h, p);
        CHECK((next.position - hover.position).norm() < 1e-12);
        CHECK(next.velocity.norm() < 1e-12);
        CHECK(next.thrust == hover.thrust);
    }
    QuadState rest = hover;
    rest.thrust = 0.0;
    const QuadState after = integrate_step(rest, {}, 1.0, p);
    CHECK(after.position.z() == Approx(10.0 - 9.81 / 2).epsilon(1e-14));
    CHECK(after.velocity.z() == Approx(-9.81).epsilon(1e-14));
}

TEST_CASE("double-integrator channels integrate exactly under a held input") {
    const VehicleParams p;
    QuadState s = QuadState::hover_at({0, 0, 10});
    s.thrust_rate = 0.2;
    s.euler_rate = {0.01, -0.02, 0.03};
    const ControlInput u{0.5, 0.02, -0.01, 0.04};
    const double t = 1.3;
    const QuadState out = run(s, u, 0.01, t, p);
    CHECK(out.thrust == Approx(p.g + 0.2 * t + 0.5 * 0.5 * t * t).epsilon(1e-12));
    CHECK(out.thrust_rate == Approx(0.2 + 0.5 * t).epsilon(1e-12));
    CHECK(out.euler.x() == Approx(0.01 * t + 0.5 * 0.02 * t * t).epsilon(1e-12));
    CHECK(out.euler.y() == Approx(-0.02 * t - 0.5 * 0.01 * t * t).epsilon(1e-12));
    CHECK(out.euler.z() == Approx(0.03 * t + 0.5 * 0.04 * t * t).epsilon(1e-12));
}

TEST_CASE("RK4 error drops about 16x when the step is halved") {
    const VehicleParams p;
    QuadState s = QuadState::hover_at({0, 0, 10});
    s.velocity = {1.0, -0.5, 0.2};
    s.euler_rate = {0.4, -0.3, 0.2};
    const ControlInput u{1.5, -0.6, 0.5, 0.1};
    const double t = 2.0;
    const QuadState ref = run(s, u, 1e-4, t, p);
    const double e1 = state_gap(run(s, u, 0.1, t, p), ref);
    const double e2 = state_gap(run(s, u, 0.05, t, p), ref);
    const double ratio = e1 / e2;
    CHECK(e1 > 1e-9);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("horizontal velocity is conserved without thrust") {
    const VehicleParams p;
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 50; ++k) {
        QuadState s;
        s.position = {u(rng), u(rng), 10};
        s.velocity = {u(rng), u(rng), u(rng)};
        s.euler = {0.3 * u(rng), 0.3 * u(rng), u(rng)};
        s.euler_rate = {u(rng), u(rng), u(rng)};
        const QuadState out = run(s, {}, 0.01, 1.0, p);
        CHECK(out.velocity.x() == Approx(s.velocity.x()).epsilon(1e-12));
        CHECK(out.velocity.y() == Approx(s.velocity.y()).epsilon(1e-12));
    }
}

TEST_CASE("integrate_step rejects non-finite results") {
    const VehicleParams p;
    QuadState s = QuadState::hover_at({0, 0, 10});
    s.velocity.x() = std::numeric_limits<double>::quiet_NaN();
    try {
        integrate_step(s, {}, 0.01, p);
        FAIL("expected NonFiniteState");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteState);
    }
    CHECK_FALSE(s.finite());
    CHECK(QuadState::hover_at({0, 0, 1}).finite());
}
