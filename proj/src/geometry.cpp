#include "cdswarm/geometry.hpp"

#include <algorithm>
#include <sstream>

#include "cdswarm/errors.hpp"

namespace cdswarm {

namespace {

Eigen::Matrix2d edge_matrix(const TriangleConfig& t) {
    Eigen::Matrix2d e;
    e << t[1].x - t[0].x, t[2].x - t[0].x,
         t[1].y - t[0].y, t[2].y - t[0].y;
    return e;
}

void require_basis(const TriangleConfig& t0, double area_epsilon) {
    if (!triangle_rank_ok(t0, area_epsilon)) {
        std::ostringstream msg;
        msg << "leading triangle edge determinant " << 2.0 * t0.signed_area() << " m^2 is below " << area_epsilon;
        throw Error(ErrorCode::DegenerateBasis, msg.str());
    }
}

}  // namespace

DeformationParams solve_deformation(const TriangleConfig& t0, const TriangleConfig& tc,
                                    double area_epsilon) {
    require_basis(t0, area_epsilon);
    // Leader differences remove D; the edge basis of t0 is invertible by the
    // rank condition.
    const Eigen::Matrix2d e0 = edge_matrix(t0);
    const Eigen::Matrix2d ec = edge_matrix(tc);
    const double det0 = e0.determinant();
    Eigen::Matrix2d e0_inv;
    e0_inv << e0(1, 1), -e0(0, 1),
              -e0(1, 0), e0(0, 0);
    e0_inv /= det0;

    DeformationParams out;
    out.q = ec * e0_inv;
    // Average the three leader residuals so D is symmetric in the leaders.
    Point2 dsum{};
    for (std::size_t j = 0; j < 3; ++j) {
        const Eigen::Vector2d mapped = out.q * Eigen::Vector2d(t0[j].x, t0[j].y);
        dsum = dsum + Point2{tc[j].x - mapped.x(), tc[j].y - mapped.y()};
    }
    out.d = (1.0 / 3.0) * dsum;
    return out;
}

Point2 apply_deformation(const DeformationParams& params, Point2 r0) {
    return {params.q(0, 0) * r0.x + params.q(0, 1) * r0.y + params.d.x,
            params.q(1, 0) * r0.x + params.q(1, 1) * r0.y + params.d.y};
}

PolarDecomp polar_decompose(const DeformationParams& params, double det_epsilon) {
    const Eigen::Matrix2d& q = params.q;
    const double det = q.determinant();
    if (!(det > det_epsilon)) {
        std::ostringstream msg;
        msg << "det(Q_CD) = " << det << " is not above " << det_epsilon;
        throw Error(ErrorCode::SingularDeformation, msg.str());
    }

    // For det > 0 the rotation factor is the rotation by
    // atan2(q21 - q12, q11 + q22); the remainder R^T Q is then symmetric.
    const double c_raw = q(0, 0) + q(1, 1);
    const double s_raw = q(1, 0) - q(0, 1);
    const double len = std::hypot(c_raw, s_raw);
    const double c = c_raw / len;
    const double s = s_raw / len;

    PolarDecomp out;
    out.r_cd << c, -s,
                s, c;
    Eigen::Matrix2d u = out.r_cd.transpose() * q;
    const double off = 0.5 * (u(0, 1) + u(1, 0));
    u(0, 1) = off;
    u(1, 0) = off;
    out.u_cd = u;

    // Eigenvalues of a symmetric 2x2; the small one via det / large avoids
    // cancellation for strongly stretched maps.
    const double mean = 0.5 * (u(0, 0) + u(1, 1));
    const double radius = std::hypot(0.5 * (u(0, 0) - u(1, 1)), off);
    out.lambda2 = mean + radius;
    out.lambda1 = det / out.lambda2;
    if (out.lambda1 > out.lambda2) std::swap(out.lambda1, out.lambda2);
    return out;
}

double min_stretch(const Eigen::Matrix2d& q) {
    // sigma_max = (|q + adj| + |q - adj|) / 2 in the conformal/anticonformal split.
    const double e = 0.5 * (q(0, 0) + q(1, 1));
    const double f = 0.5 * (q(0, 0) - q(1, 1));
    const double g = 0.5 * (q(1, 0) + q(0, 1));
    const double h = 0.5 * (q(1, 0) - q(0, 1));
    const double qn = std::hypot(e, h);
    const double rn = std::hypot(f, g);
    const double smax = qn + rn;
    if (smax == 0.0) return 0.0;
    return std::abs(q.determinant()) / smax;
}

BarycentricWeights barycentric_weights(const TriangleConfig& t0, Point2 r0, double area_epsilon) {
    require_basis(t0, area_epsilon);
    const double twice_area = cross(t0[1] - t0[0], t0[2] - t0[0]);
    BarycentricWeights w;
    w.a1 = cross(t0[1] - r0, t0[2] - r0) / twice_area;
    w.a2 = cross(t0[2] - r0, t0[0] - r0) / twice_area;
    w.a3 = 1.0 - w.a1 - w.a2;
    return w;
}

Point2 follower_position(const BarycentricWeights& w, const TriangleConfig& leaders) {
    return w.a1 * leaders[0] + w.a2 * leaders[1] + w.a3 * leaders[2];
}

bool triangle_rank_ok(const TriangleConfig& tc, double area_epsilon) {
    return std::abs(cross(tc[1] - tc[0], tc[2] - tc[0])) >= area_epsilon;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

}  // namespace cdswarm
