#pragma once

// C2 desired trajectories: leaders move on straight segments between plan
// waypoints with a quintic blend beta(tau); followers track the barycentric
// combination of the leaders.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cdswarm/geometry.hpp"
#include "cdswarm/planner.hpp"

namespace cdswarm {

// beta(tau) = sum_i a[i] * tau^(5 - i) on [0, dt].
struct QuinticSegment {
    std::array<double, 6> a{};
    double dt = 1.0;
};

struct BetaState {
    double beta = 0.0;
    double beta_dot = 0.0;
    double beta_ddot = 0.0;
};

struct DesiredState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
};

/// Rest-to-rest quintic with beta(0) = 0 and beta(dt) = 1.
QuinticSegment quintic_coeffs(double dt);

/// Throws OutOfSegment for tau outside [0, dt].
BetaState beta_eval(const QuinticSegment& seg, double tau);

class SwarmTrajectory {
  public:
    /// Weights are taken from the first plan waypoint. Throws ValidationError
    /// for an empty plan or dt <= 0.
    SwarmTrajectory(std::vector<TriangleConfig> waypoints, double dt, double z_ht,
                    std::span<const Point2> followers);
    SwarmTrajectory(const LeaderPlan& plan, double dt, double z_ht, std::span<const Point2> followers)
        : SwarmTrajectory(plan.waypoints, dt, z_ht, followers) {}

    double horizon() const { return dt_ * static_cast<double>(waypoints_.size() - 1); }
    double dt() const { return dt_; }
    double altitude() const { return z_ht_; }
    std::size_t follower_count() const { return weights_.size(); }
    std::size_t agent_count() const { return 3 + weights_.size(); }
    const TriangleConfig& initial() const { return waypoints_.front(); }
    const std::vector<TriangleConfig>& waypoints() const { return waypoints_; }
    const std::vector<BarycentricWeights>& weights() const { return weights_; }
    const QuinticSegment& blend() const { return blend_; }

    /// Leader l in {0, 1, 2}. Throws OutOfHorizon outside [0, horizon()].
    DesiredState leader_desired(std::size_t l, double t) const;
    /// Follower i in [0, follower_count()). Throws OutOfHorizon.
    DesiredState follower_desired(std::size_t i, double t) const;
    /// Agents are ordered leaders first, then followers.
    DesiredState agent_desired(std::size_t agent, double t) const;

    /// Leader positions at t (planar).
    TriangleConfig leaders_at(double t) const;

  private:
    std::array<DesiredState, 3> leaders_state(double t) const;

    std::vector<TriangleConfig> waypoints_;
    double dt_;
    double z_ht_;
    QuinticSegment blend_;
    std::vector<BarycentricWeights> weights_;
};

struct DeformationSample {
    double t = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double c_col = 0.0;
};

/// Polar decomposition of the deformation relative to the initial
/// configuration, sampled every sample_dt over [0, horizon].
std::vector<DeformationSample> deformation_series(const SwarmTrajectory& traj, double sample_dt,
                                                  double lambda_cd_min);

}  // namespace cdswarm
