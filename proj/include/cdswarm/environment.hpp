#pragma once

// Motion space: rectangular bounds, axis-aligned no-fly zones, a rasterised
// human-presence probability field and scripted pedestrians.

#include <vector>

#include "cdswarm/geometry.hpp"

namespace cdswarm {

struct Rect {
    Point2 min{};
    Point2 max{};

    // Closed set: the boundary counts as inside.
    constexpr bool contains(Point2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    constexpr bool contains(const Rect& r) const { return contains(r.min) && contains(r.max); }
    constexpr double width() const { return max.x - min.x; }
    constexpr double height() const { return max.y - min.y; }
};

double point_rect_distance(Point2 p, const Rect& r);

// Node-valued grid: values[j * nx + i] is the probability at
// origin + (i, j) * cell_size. Bilinear in between.
class RiskField {
  public:
    RiskField() = default;
    RiskField(Point2 origin, double cell_size, int nx, int ny, std::vector<double> values);

    static RiskField uniform(const Rect& cover, double cell_size, double value);

    Point2 origin() const { return origin_; }
    double cell_size() const { return cell_size_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double node(int i, int j) const { return values_[static_cast<std::size_t>(j) * nx_ + i]; }
    const std::vector<double>& values() const { return values_; }
    Rect extent() const;

    /// Bilinear interpolation; queries outside the grid are clamped to its edge.
    double sample(Point2 r) const;

  private:
    Point2 origin_{};
    double cell_size_ = 1.0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> values_;
};

struct Walker {
    Point2 start{};
    Point2 end{};
    double speed = 1.0;                // m/s
    double radius_of_influence = 5.0;  // m
    double peak_probability = 1.0;
};

Point2 walker_position(const Walker& w, double t);

// Presence bump of a walker standing at `at`: peak * (1 - (d/R)^2)^2 inside R.
double walker_bump(const Walker& w, Point2 at, Point2 r);

struct Environment {
    Rect bounds{};
    std::vector<Rect> nfz;
    RiskField risk;
    std::vector<Walker> walkers;
};

/// Grid value plus the bumps of every walker at time t, clamped to [0, 1].
/// Throws OutOfBounds when r lies outside env.bounds.
double human_probability(const Environment& env, Point2 r, double t);

/// Time-invariant field used for planning: the grid plus, for each walker,
/// the bump taken at the closest point of its whole path (the corridor).
double corridor_probability(const Environment& env, Point2 r);

bool in_nfz(const Environment& env, Point2 r);

}  // namespace cdswarm
