#include "cdswarm/environment.hpp"

#include <algorithm>
#include <sstream>

#include "cdswarm/errors.hpp"

namespace cdswarm {

double point_rect_distance(Point2 p, const Rect& r) {
    const double dx = std::max({r.min.x - p.x, 0.0, p.x - r.max.x});
    const double dy = std::max({r.min.y - p.y, 0.0, p.y - r.max.y});
    return std::hypot(dx, dy);
}

RiskField::RiskField(Point2 origin, double cell_size, int nx, int ny, std::vector<double> values)
    : origin_(origin), cell_size_(cell_size), nx_(nx), ny_(ny), values_(std::move(values)) {
    if (!(cell_size > 0.0) || nx < 2 || ny < 2 ||
        values_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
        throw Error(ErrorCode::ValidationError, "risk grid needs cell_size > 0, at least 2x2 nodes "
                                                "and nx*ny values");
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::ValidationError, "risk grid values must lie in [0, 1]");
        }
    }
}

RiskField RiskField::uniform(const Rect& cover, double cell_size, double value) {
    const int nx = static_cast<int>(std::ceil(cover.width() / cell_size)) + 1;
    const int ny = static_cast<int>(std::ceil(cover.height() / cell_size)) + 1;
    return RiskField(cover.min, cell_size, std::max(nx, 2), std::max(ny, 2),
                     std::vector<double>(static_cast<std::size_t>(std::max(nx, 2)) * std::max(ny, 2), value));
}

Rect RiskField::extent() const {
    return {origin_, {origin_.x + (nx_ - 1) * cell_size_, origin_.y + (ny_ - 1) * cell_size_}};
}

double RiskField::sample(Point2 r) const {
    if (values_.empty()) return 0.0;
    const double gx = std::clamp((r.x - origin_.x) / cell_size_, 0.0, static_cast<double>(nx_ - 1));
    const double gy = std::clamp((r.y - origin_.y) / cell_size_, 0.0, static_cast<double>(ny_ - 1));
    const int i = std::min(static_cast<int>(gx), nx_ - 2);
    const int j = std::min(static_cast<int>(gy), ny_ - 2);
    const double fx = gx - i;
    const double fy = gy - j;
    return (1 - fx) * (1 - fy) * node(i, j) + fx * (1 - fy) * node(i + 1, j) +
           (1 - fx) * fy * node(i, j + 1) + fx * fy * node(i + 1, j + 1);
}

Point2 walker_position(const Walker& w, double t) {
    const Point2 path = w.end - w.start;
    const double length = path.norm();
    if (length == 0.0 || t <= 0.0) return w.start;
    const double travelled = w.speed * t;
    if (travelled >= length) return w.end;
    return w.start + (travelled / length) * path;
}

double walker_bump(const Walker& w, Point2 at, Point2 r) {
    const double d = distance(at, r);
    if (d >= w.radius_of_influence) return 0.0;
    const double s = d / w.radius_of_influence;
    const double k = 1.0 - s * s;
    return w.peak_probability * k * k;
}

namespace {

void require_inside(const Environment& env, Point2 r) {
    if (!env.bounds.contains(r)) {
        std::ostringstream msg;
        msg << "(" << r.x << ", " << r.y << ") is outside the motion space";
        throw Error(ErrorCode::OutOfBounds, msg.str());
    }
}

Point2 closest_on_segment(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return a;
    return a + std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) * ab;
}

}  // namespace

double human_probability(const Environment& env, Point2 r, double t) {
    require_inside(env, r);
    double p = env.risk.sample(r);
    for (const Walker& w : env.walkers) p += walker_bump(w, walker_position(w, t), r);
    return std::clamp(p, 0.0, 1.0);
}

double corridor_probability(const Environment& env, Point2 r) {
    require_inside(env, r);
    double p = env.risk.sample(r);
    for (const Walker& w : env.walkers) p += walker_bump(w, closest_on_segment(r, w.start, w.end), r);
    return std::clamp(p, 0.0, 1.0);
}

bool in_nfz(const Environment& env, Point2 r) {
    return std::any_of(env.nfz.begin(), env.nfz.end(), [&](const Rect& z) { return z.contains(r); });
}

}  // namespace cdswarm
