#pragma once

// Collision-avoidance certificate for a deforming team and the predicate
// that decides whether a candidate leading triangle is admissible.

#include <span>
#include <vector>

#include "cdswarm/environment.hpp"
#include "cdswarm/geometry.hpp"

namespace cdswarm {

// Slack on C_Col <= 0 so that exact rigid motions (lambda1 == 1 up to
// rounding) certify against lambda_cd_min == 1.
inline constexpr double kCertificateTolerance = 1e-9;

struct InitialMargins {
    double d_s = 0.0;  // min pairwise separation, leaders included
    double d_b = 0.0;  // min follower distance to the triangle sides
};

struct SafetyMargins {
    double epsilon = 0.5;  // enclosing-ball radius, m
    double d_s = 0.0;
    double d_b = 0.0;
    double delta = 0.1;  // tracking-error bound, m
    double delta_max = 0.0;
    double lambda_cd_min = 1.0;

    // Inflation applied to the leading triangle against no-fly zones and bounds.
    double clearance() const { return epsilon + delta; }
};

/// Throws AgentOutsideTriangle if a follower lies outside t0 and
/// ValidationError with fewer than two agents in total.
InitialMargins initial_margins(const TriangleConfig& t0, std::span<const Point2> followers);

/// min{ (d_s - 2 eps) / 2, d_b - eps }. Throws InfeasibleMargins unless
/// d_s > 2 eps and d_b > eps.
double delta_max(double d_s, double d_b, double epsilon);

/// (delta + eps) / (delta_max + eps). Throws DeltaExceedsMax if delta > delta_max.
double lambda_cd_min(double delta, double epsilon, double delta_max);

/// Full margin set for a team; combines the three functions above.
SafetyMargins make_margins(const TriangleConfig& t0, std::span<const Point2> followers,
                           double epsilon, double delta);

/// lambda_cd_min - lambda1; <= 0 certifies the configuration.
double collision_constraint(const PolarDecomp& pd, double lambda_cd_min);

/// True iff the triangle inflated by `clearance` misses every no-fly zone and
/// stays inside the motion-space bounds.
bool triangle_clear(const TriangleConfig& tc, double clearance, const Environment& env);

/// Rank, collision certificate and zone clearance of tc_next relative to t0.
bool valid_deformation(const TriangleConfig& t0, const TriangleConfig& tc_next,
                       const SafetyMargins& margins, const Environment& env);

/// Certifies the straight-line leader motion from `from` to `to`: the
/// minimum stretch stays >= lambda_cd_min for every blend in [0, 1]
/// (Lipschitz bisection on sigma_min), and the swept region stays clear.
bool segment_certified(const TriangleConfig& t0, const TriangleConfig& from,
                       const TriangleConfig& to, const SafetyMargins& margins,
                       const Environment& env);

// Convex polygon helpers (counter-clockwise output, collinear points dropped).
std::vector<Point2> convex_hull(std::vector<Point2> pts);
double polygon_rect_distance(std::span<const Point2> convex_polygon, const Rect& r);

}  // namespace cdswarm
