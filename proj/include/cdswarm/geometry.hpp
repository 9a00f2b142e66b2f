#pragma once

// Planar homogeneous transformation of a leader-follower team.
//
// A team is described by a leading triangle (three leader positions) and
// followers expressed in barycentric weights of the initial triangle. Any
// later leader configuration induces a unique affine map r = Q r0 + D that
// carries every initial position to its desired position.

#include <array>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/LU>

namespace cdswarm {

inline constexpr double kDefaultAreaEpsilon = 1e-6;  // m^2
inline constexpr double kDefaultDetEpsilon = 1e-12;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend constexpr Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point2, Point2) = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

// Leaders 1, 2, 3 of the leading triangle at one instant.
struct TriangleConfig {
    std::array<Point2, 3> p{};

    Point2& operator[](std::size_t i) { return p[i]; }
    const Point2& operator[](std::size_t i) const { return p[i]; }

    constexpr double signed_area() const { return 0.5 * cross(p[1] - p[0], p[2] - p[0]); }
    constexpr Point2 centroid() const {
        return {(p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0};
    }

    friend constexpr bool operator==(const TriangleConfig&, const TriangleConfig&) = default;
};

struct DeformationParams {
    Eigen::Matrix2d q = Eigen::Matrix2d::Identity();  // Jacobian block Q_CD
    Point2 d{};                                       // rigid translation D

    double det() const { return q.determinant(); }
};

// Q_CD = r_cd * u_cd with r_cd a proper rotation and u_cd symmetric positive
// definite; lambda1 <= lambda2 are the eigenvalues of u_cd.
struct PolarDecomp {
    Eigen::Matrix2d r_cd = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d u_cd = Eigen::Matrix2d::Identity();
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};

struct BarycentricWeights {
    double a1 = 1.0 / 3.0;
    double a2 = 1.0 / 3.0;
    double a3 = 1.0 / 3.0;

    constexpr double sum() const { return a1 + a2 + a3; }
};

/// Solves Q_CD and D such that each initial leader maps onto its current
/// position. Throws DegenerateBasis when |area(t0)| < area_epsilon.
DeformationParams solve_deformation(const TriangleConfig& t0, const TriangleConfig& tc,
                                    double area_epsilon = kDefaultAreaEpsilon);

Point2 apply_deformation(const DeformationParams& params, Point2 r0);

/// Closed-form 2x2 polar decomposition. Throws SingularDeformation when
/// det(Q_CD) <= det_epsilon; reflections are rejected, not flipped.
PolarDecomp polar_decompose(const DeformationParams& params,
                            double det_epsilon = kDefaultDetEpsilon);

/// Smallest singular value of Q_CD without building the factors.
double min_stretch(const Eigen::Matrix2d& q);

BarycentricWeights barycentric_weights(const TriangleConfig& t0, Point2 r0,
                                       double area_epsilon = kDefaultAreaEpsilon);

Point2 follower_position(const BarycentricWeights& w, const TriangleConfig& leaders);

/// |det [p2 - p1, p3 - p1]| >= area_epsilon, i.e. twice the triangle area.
bool triangle_rank_ok(const TriangleConfig& tc, double area_epsilon = kDefaultAreaEpsilon);

// Distance from p to the closed segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

}  // namespace cdswarm
