#include "cdswarm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdswarm/errors.hpp"
#include "cdswarm/safety.hpp"

namespace cdswarm {

QuinticSegment quintic_coeffs(double dt) {
    // Rest-to-rest blend 10 s^3 - 15 s^4 + 6 s^5 in normalised time s = tau / dt.
    const double dt3 = dt * dt * dt;
    QuinticSegment seg;
    seg.dt = dt;
    seg.a = {6.0 / (dt3 * dt * dt), -15.0 / (dt3 * dt), 10.0 / dt3, 0.0, 0.0, 0.0};
    return seg;
}

BetaState beta_eval(const QuinticSegment& seg, double tau) {
    if (!(tau >= 0.0 && tau <= seg.dt)) {
        std::ostringstream msg;
        msg << "tau = " << tau << " outside [0, " << seg.dt << "]";
        throw Error(ErrorCode::OutOfSegment, msg.str());
    }
    const auto& a = seg.a;
    BetaState out;
    // Horner on the descending-power coefficients.
    out.beta = ((((a[0] * tau + a[1]) * tau + a[2]) * tau + a[3]) * tau + a[4]) * tau + a[5];
    out.beta_dot = (((5 * a[0] * tau + 4 * a[1]) * tau + 3 * a[2]) * tau + 2 * a[3]) * tau + a[4];
    out.beta_ddot = ((20 * a[0] * tau + 12 * a[1]) * tau + 6 * a[2]) * tau + 2 * a[3];
    return out;
}

SwarmTrajectory::SwarmTrajectory(std::vector<TriangleConfig> waypoints, double dt, double z_ht,
                                 std::span<const Point2> followers)
    : waypoints_(std::move(waypoints)), dt_(dt), z_ht_(z_ht) {
    if (waypoints_.empty()) throw Error(ErrorCode::ValidationError, "plan has no waypoints");
    if (!(dt > 0.0)) throw Error(ErrorCode::ValidationError, "segment duration must be positive");
    blend_ = quintic_coeffs(dt);
    weights_.reserve(followers.size());
    for (Point2 r0 : followers) weights_.push_back(barycentric_weights(waypoints_.front(), r0));
}

std::array<DesiredState, 3> SwarmTrajectory::leaders_state(double t) const {
    const double end = horizon();
    if (!(t >= 0.0 && t <= end)) {
        std::ostringstream msg;
        msg << "t = " << t << " s outside the mission horizon [0, " << end << "]";
        throw Error(ErrorCode::OutOfHorizon, msg.str());
    }
    std::array<DesiredState, 3> out;
    if (waypoints_.size() == 1) {
        for (std::size_t l = 0; l < 3; ++l) out[l].position = {waypoints_[0][l].x, waypoints_[0][l].y, z_ht_};
        return out;
    }
    const std::size_t segments = waypoints_.size() - 1;
    const auto k = std::min(static_cast<std::size_t>(t / dt_), segments - 1);
    const double tau = std::clamp(t - static_cast<double>(k) * dt_, 0.0, dt_);
    const BetaState b = beta_eval(blend_, tau);
    const TriangleConfig& from = waypoints_[k];
    const TriangleConfig& to = waypoints_[k + 1];
    for (std::size_t l = 0; l < 3; ++l) {
        const Point2 step = to[l] - from[l];
        const Point2 p = from[l] + b.beta * step;
        out[l].position = {p.x, p.y, z_ht_};
        out[l].velocity = {b.beta_dot * step.x, b.beta_dot * step.y, 0.0};
        out[l].acceleration = {b.beta_ddot * step.x, b.beta_ddot * step.y, 0.0};
    }
    return out;
}

DesiredState SwarmTrajectory::leader_desired(std::size_t l, double t) const {
    return leaders_state(t).at(l);
}

DesiredState SwarmTrajectory::follower_desired(std::size_t i, double t) const {
    const BarycentricWeights& w = weights_.at(i);
    const auto s = leaders_state(t);
    DesiredState out;
    out.position = w.a1 * s[0].position + w.a2 * s[1].position + w.a3 * s[2].position;
    out.velocity = w.a1 * s[0].velocity + w.a2 * s[1].velocity + w.a3 * s[2].velocity;
    out.acceleration = w.a1 * s[0].acceleration + w.a2 * s[1].acceleration + w.a3 * s[2].acceleration;
    out.position.z() = z_ht_;
    return out;
}

DesiredState SwarmTrajectory::agent_desired(std::size_t agent, double t) const {
    return agent < 3 ? leader_desired(agent, t) : follower_desired(agent - 3, t);
}

TriangleConfig SwarmTrajectory::leaders_at(double t) const {
    const auto s = leaders_state(t);
    TriangleConfig out;
    for (std::size_t l = 0; l < 3; ++l) out[l] = {s[l].position.x(), s[l].position.y()};
    return out;
}

std::vector<DeformationSample> deformation_series(const SwarmTrajectory& traj, double sample_dt,
                                                  double lambda_min) {
    if (!(sample_dt > 0.0)) throw Error(ErrorCode::ValidationError, "sample_dt must be positive");
    const double end = traj.horizon();
    const auto count = static_cast<std::size_t>(std::floor(end / sample_dt + 1e-9)) + 1;
    std::vector<DeformationSample> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        DeformationSample s;
        s.t = std::min(static_cast<double>(n) * sample_dt, end);
        const PolarDecomp pd = polar_decompose(solve_deformation(traj.initial(), traj.leaders_at(s.t)));
        s.lambda1 = pd.lambda1;
        s.lambda2 = pd.lambda2;
        s.c_col = collision_constraint(pd, lambda_min);
        out.push_back(s);
    }
    return out;
}

}  // namespace cdswarm
