#include "cdswarm/safety.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <sstream>

#include "cdswarm/errors.hpp"

namespace cdswarm {

namespace {

constexpr double kInsideTolerance = 1e-12;

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    auto on = [](Point2 p, Point2 q, Point2 r) {
        return cross(q - p, r - p) == 0.0 && std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    return on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b);
}

double segment_segment_distance(Point2 a, Point2 b, Point2 c, Point2 d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool inside_convex_ccw(std::span<const Point2> poly, Point2 p) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
}

std::array<Point2, 4> corners(const Rect& r) {
    return {r.min, Point2{r.max.x, r.min.y}, r.max, Point2{r.min.x, r.max.y}};
}

bool region_clear(std::span<const Point2> points, double clearance, const Environment& env) {
    const Rect shrunk{{env.bounds.min.x + clearance, env.bounds.min.y + clearance},
                      {env.bounds.max.x - clearance, env.bounds.max.y - clearance}};
    for (Point2 p : points) {
        if (!shrunk.contains(p)) return false;
    }
    if (env.nfz.empty()) return true;
    const std::vector<Point2> hull = convex_hull({points.begin(), points.end()});
    for (const Rect& zone : env.nfz) {
        if (!(polygon_rect_distance(hull, zone) > clearance)) return false;
    }
    return true;
}

// Conformal and anticonformal parts of a 2x2 matrix. The singular values are
// |c| + |a| and ||c| - |a||, and det = |c|^2 - |a|^2.
Eigen::Vector2d conformal(const Eigen::Matrix2d& m) {
    return {0.5 * (m(0, 0) + m(1, 1)), 0.5 * (m(1, 0) - m(0, 1))};
}

Eigen::Vector2d anticonformal(const Eigen::Matrix2d& m) {
    return {0.5 * (m(0, 0) - m(1, 1)), 0.5 * (m(1, 0) + m(0, 1))};
}

}  // namespace

InitialMargins initial_margins(const TriangleConfig& t0, std::span<const Point2> followers) {
    std::vector<Point2> agents(t0.p.begin(), t0.p.end());
    agents.insert(agents.end(), followers.begin(), followers.end());
    if (agents.size() < 2) {
        throw Error(ErrorCode::ValidationError, "at least two agents are required");
    }

    InitialMargins out;
    out.d_s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            out.d_s = std::min(out.d_s, distance(agents[i], agents[j]));
        }
    }

    out.d_b = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < followers.size(); ++k) {
        const Point2 r = followers[k];
        const BarycentricWeights w = barycentric_weights(t0, r);
        if (w.a1 < -kInsideTolerance || w.a2 < -kInsideTolerance || w.a3 < -kInsideTolerance) {
            std::ostringstream msg;
            msg << "follower " << k << " at (" << r.x << ", " << r.y << ") is outside the leading triangle";
            throw Error(ErrorCode::AgentOutsideTriangle, msg.str());
        }
        for (std::size_t s = 0; s < 3; ++s) {
            out.d_b = std::min(out.d_b, point_segment_distance(r, t0[s], t0[(s + 1) % 3]));
        }
    }
    return out;
}

double delta_max(double d_s, double d_b, double epsilon) {
    if (!(d_s > 2.0 * epsilon) || !(d_b > epsilon)) {
        std::ostringstream msg;
        msg << "d_s = " << d_s << ", d_b = " << d_b << " leave no deviation budget for eps = " << epsilon;
        throw Error(ErrorCode::InfeasibleMargins, msg.str());
    }
    return std::min(0.5 * (d_s - 2.0 * epsilon), d_b - epsilon);
}

double lambda_cd_min(double delta, double epsilon, double delta_max) {
    if (delta > delta_max) {
        std::ostringstream msg;
        msg << "delta = " << delta << " exceeds delta_max = " << delta_max;
        throw Error(ErrorCode::DeltaExceedsMax, msg.str());
    }
    return (delta + epsilon) / (delta_max + epsilon);
}

SafetyMargins make_margins(const TriangleConfig& t0, std::span<const Point2> followers,
                           double epsilon, double delta) {
    const InitialMargins m = initial_margins(t0, followers);
    SafetyMargins out;
    out.epsilon = epsilon;
    out.delta = delta;
    out.d_s = m.d_s;
    // With no followers there is no side constraint; only separation binds.
    out.d_b = followers.empty() ? std::numeric_limits<double>::infinity() : m.d_b;
    out.delta_max = delta_max(out.d_s, out.d_b, epsilon);
    out.lambda_cd_min = lambda_cd_min(delta, epsilon, out.delta_max);
    return out;
}

double collision_constraint(const PolarDecomp& pd, double lambda_min) {
    return lambda_min - pd.lambda1;
}

bool triangle_clear(const TriangleConfig& tc, double clearance, const Environment& env) {
    return region_clear(tc.p, clearance, env);
}

bool valid_deformation(const TriangleConfig& t0, const TriangleConfig& tc_next,
                       const SafetyMargins& margins, const Environment& env) {
    if (!triangle_rank_ok(tc_next)) return false;
    const DeformationParams params = solve_deformation(t0, tc_next);
    if (!(params.det() > kDefaultDetEpsilon)) return false;
    if (collision_constraint(polar_decompose(params), margins.lambda_cd_min) > kCertificateTolerance) {
        return false;
    }
    return triangle_clear(tc_next, margins.clearance(), env);
}

bool segment_certified(const TriangleConfig& t0, const TriangleConfig& from,
                       const TriangleConfig& to, const SafetyMargins& margins,
                       const Environment& env) {
    const Eigen::Matrix2d qa = solve_deformation(t0, from).q;
    const Eigen::Matrix2d qb = solve_deformation(t0, to).q;
    if (!(qa.determinant() > 0.0) || !(qb.determinant() > 0.0)) return false;
    // Along Q(beta) = qa + beta (qb - qa) the signed minimum stretch is
    // |c(beta)| - |a(beta)| with c, a affine in beta. On a piece, |c| lies above
    // its tangent at the midpoint and |a| below its chord, which gives a linear
    // lower bound that is exact whenever either norm is linear.
    const Eigen::Vector2d c0 = conformal(qa), c1 = conformal(qb - qa);
    const Eigen::Vector2d a0 = anticonformal(qa), a1 = anticonformal(qb - qa);
    const double threshold = margins.lambda_cd_min - kCertificateTolerance;
    auto stretch = [&](double beta) { return (c0 + beta * c1).norm() - (a0 + beta * a1).norm(); };

    struct Piece {
        double b0, s0, b1, s1;
        int depth;
    };
    std::vector<Piece> stack{{0.0, stretch(0.0), 1.0, stretch(1.0), 0}};
    while (!stack.empty()) {
        const Piece p = stack.back();
        stack.pop_back();
        if (std::min(p.s0, p.s1) < threshold) return false;
        const double mid = 0.5 * (p.b0 + p.b1);
        const Eigen::Vector2d cm = c0 + mid * c1;
        const double cn = cm.norm();
        const double tangent_slope = cn > 0.0 ? cm.dot(c1) / cn : 0.0;
        const double half = 0.5 * (p.b1 - p.b0);
        const double an0 = (a0 + p.b0 * a1).norm();
        const double an1 = (a0 + p.b1 * a1).norm();
        const double lower = std::min(cn - tangent_slope * half - an0, cn + tangent_slope * half - an1);
        if (lower >= threshold) continue;
        if (p.depth >= 40) return false;
        const double sm = stretch(mid);
        stack.push_back({p.b0, p.s0, mid, sm, p.depth + 1});
        stack.push_back({mid, sm, p.b1, p.s1, p.depth + 1});
    }

    // The moving triangle sweeps a subset of the hull of both endpoint triangles.
    const std::array<Point2, 6> swept{from[0], from[1], from[2], to[0], to[1], to[2]};
    return region_clear(swept, margins.clearance(), env);
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_rect_distance(std::span<const Point2> poly, const Rect& r) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    for (Point2 p : poly) {
        if (r.contains(p)) return 0.0;
    }
    const auto rc = corners(r);
    if (poly.size() >= 3) {
        for (Point2 c : rc) {
            if (inside_convex_ccw(poly, c)) return 0.0;
        }
    }
    if (poly.size() == 1) return point_rect_distance(poly[0], r);

    double best = std::numeric_limits<double>::infinity();
    const std::size_t edges = poly.size() == 2 ? 1 : poly.size();
    for (std::size_t i = 0; i < edges; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        for (std::size_t j = 0; j < 4; ++j) {
            best = std::min(best, segment_segment_distance(a, b, rc[j], rc[(j + 1) % 4]));
        }
    }
    return best;
}

}  // namespace cdswarm
