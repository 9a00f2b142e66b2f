#include "cdswarm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cdswarm {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// World-to-canvas mapping with y pointing up in the world.
class Canvas {
  public:
    Canvas(const Rect& world, double width_px, double margin_px = 40.0)
        : world_(world), margin_(margin_px), scale_((width_px - 2 * margin_px) / world.width()) {
        width_ = width_px;
        height_ = world.height() * scale_ + 2 * margin_px;
    }

    double x(double wx) const { return margin_ + (wx - world_.min.x) * scale_; }
    double y(double wy) const { return height_ - margin_ - (wy - world_.min.y) * scale_; }
    double len(double w) const { return w * scale_; }

    std::ostringstream& body() { return body_; }

    void rect(const Rect& r, const std::string& style) {
        body_ << "<rect x=\"" << fmt(x(r.min.x)) << "\" y=\"" << fmt(y(r.max.y)) << "\" width=\""
              << fmt(len(r.width())) << "\" height=\"" << fmt(len(r.height())) << "\" " << style << "/>\n";
    }
    void polyline(const std::vector<Point2>& pts, const std::string& style, bool closed = false) {
        body_ << (closed ? "<polygon" : "<polyline") << " points=\"";
        for (Point2 p : pts) body_ << fmt(x(p.x)) << ',' << fmt(y(p.y)) << ' ';
        body_ << "\" " << style << "/>\n";
    }
    void circle(Point2 c, double r_px, const std::string& style) {
        body_ << "<circle cx=\"" << fmt(x(c.x)) << "\" cy=\"" << fmt(y(c.y)) << "\" r=\"" << fmt(r_px) << "\" "
              << style << "/>\n";
    }
    void text(double px, double py, const std::string& s, const std::string& style = "font-size=\"12\"") {
        body_ << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(py) << "\" " << style << ">" << s << "</text>\n";
    }

    std::string str() const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width_) << "\" height=\"" << fmt(height_)
           << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           << body_.str() << "</svg>\n";
        return os.str();
    }

    double width() const { return width_; }

  private:
    Rect world_;
    double margin_;
    double scale_;
    double width_ = 0.0;
    double height_ = 0.0;
    std::ostringstream body_;
};

std::vector<Point2> corners_of(const TriangleConfig& t) { return {t[0], t[1], t[2]}; }

void draw_environment(Canvas& c, const Scenario& s) {
    const RiskField& risk = s.env.risk;
    const double h = risk.cell_size();
    for (int j = 0; j < risk.ny(); ++j) {
        for (int i = 0; i < risk.nx(); ++i) {
            const double v = risk.node(i, j);
            if (v < 0.01) continue;
            const Point2 p{risk.origin().x + i * h, risk.origin().y + j * h};
            Rect cell{{p.x - 0.5 * h, p.y - 0.5 * h}, {p.x + 0.5 * h, p.y + 0.5 * h}};
            cell.min = {std::max(cell.min.x, s.env.bounds.min.x), std::max(cell.min.y, s.env.bounds.min.y)};
            cell.max = {std::min(cell.max.x, s.env.bounds.max.x), std::min(cell.max.y, s.env.bounds.max.y)};
            c.rect(cell, "fill=\"#e8a33d\" fill-opacity=\"" + fmt(0.8 * v) + "\"");
        }
    }
    c.rect(s.env.bounds, "fill=\"none\" stroke=\"black\"");
    for (const Rect& z : s.env.nfz) c.rect(z, "fill=\"#d62728\" fill-opacity=\"0.6\" stroke=\"#d62728\"");
    for (const Walker& w : s.env.walkers) {
        c.polyline({w.start, w.end}, "stroke=\"#9467bd\" stroke-width=\"" + fmt(c.len(2 * w.radius_of_influence)) +
                                         "\" stroke-opacity=\"0.15\" fill=\"none\"");
        c.polyline({w.start, w.end}, "stroke=\"#9467bd\" stroke-dasharray=\"4 3\" fill=\"none\"");
    }
}

const char* kLeaderColors[3] = {"#1f77b4", "#2ca02c", "#ff7f0e"};

}  // namespace

std::vector<double> snapshot_times(double end, double every) {
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double t = k * every;
        if (t > end + 1e-9) break;
        out.push_back(t);
    }
    return out;
}

std::string paths_svg(const Scenario& s, const SwarmTrajectory& traj) {
    Canvas c(s.env.bounds, 900.0);
    draw_environment(c, s);
    const auto& wps = traj.waypoints();
    c.polyline(corners_of(wps.front()), "fill=\"#1f77b4\" fill-opacity=\"0.08\" stroke=\"#1f77b4\"", true);
    c.polyline(corners_of(wps.back()), "fill=\"#2ca02c\" fill-opacity=\"0.08\" stroke=\"#2ca02c\"", true);
    for (std::size_t l = 0; l < 3; ++l) {
        std::vector<Point2> path;
        for (const auto& w : wps) path.push_back(w[l]);
        c.polyline(path, std::string("fill=\"none\" stroke-width=\"2\" stroke=\"") + kLeaderColors[l] + "\"");
        for (Point2 p : path) c.circle(p, 2.5, std::string("fill=\"") + kLeaderColors[l] + "\"");
        c.text(c.x(path.front().x) + 6, c.y(path.front().y) - 6, "L" + std::to_string(l + 1));
    }
    for (std::size_t i = 0; i < traj.follower_count(); ++i) {
        const auto p0 = traj.follower_desired(i, 0.0).position;
        const auto p1 = traj.follower_desired(i, traj.horizon()).position;
        c.circle({p0.x(), p0.y()}, 2.5, "fill=\"#555\"");
        c.circle({p1.x(), p1.y()}, 2.5, "fill=\"#555\"");
    }
    c.text(10, 20, s.name + ": leader paths over human-presence field", "font-size=\"14\"");
    return c.str();
}

std::string eigenvalue_svg(const std::vector<DeformationSample>& series, const std::string& title) {
    const double w = 800, h = 400, m = 50;
    double t_end = series.empty() ? 1.0 : std::max(series.back().t, 1e-9);
    double lo = 1.0, hi = 1.0;
    for (const auto& s : series) {
        lo = std::min(lo, s.lambda1);
        hi = std::max(hi, s.lambda2);
    }
    lo = std::floor((lo - 0.05) * 10) / 10;
    hi = std::ceil((hi + 0.05) * 10) / 10;
    auto px = [&](double t) { return m + (w - 2 * m) * t / t_end; };
    auto py = [&](double v) { return h - m - (h - 2 * m) * (v - lo) / (hi - lo); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << m << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    os << "<polyline points=\"" << m << ',' << m << ' ' << m << ',' << h - m << ' ' << w - m << ',' << h - m
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        os << "<text x=\"5\" y=\"" << fmt(py(v) + 4) << "\" font-size=\"11\">" << fmt(v) << "</text>\n";
        const double t = t_end * k / 4.0;
        os << "<text x=\"" << fmt(px(t) - 10) << "\" y=\"" << h - m + 16 << "\" font-size=\"11\">" << fmt(t)
           << "</text>\n";
    }
    os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" font-size=\"12\">t (s)</text>\n";
    const char* colors[2] = {"#1f77b4", "#d62728"};
    for (int which = 0; which < 2; ++which) {
        os << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colors[which] << "\" points=\"";
        for (const auto& s : series) os << fmt(px(s.t)) << ',' << fmt(py(which == 0 ? s.lambda1 : s.lambda2)) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << w - m - 60 << "\" y=\"" << m + 16 * which << "\" fill=\"" << colors[which]
           << "\" font-size=\"12\">lambda" << which + 1 << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string snapshot_svg(const Scenario& s, const SwarmTrajectory& traj, double t,
                         const std::optional<std::vector<Point2>>& actual) {
    Canvas c(s.env.bounds, 600.0);
    draw_environment(c, s);
    const double t_ref = std::clamp(t, 0.0, traj.horizon());
    c.polyline(corners_of(traj.leaders_at(t_ref)), "fill=\"#1f77b4\" fill-opacity=\"0.1\" stroke=\"#1f77b4\"", true);
    const double r_px = std::max(1.5, c.len(s.epsilon));
    for (std::size_t i = 0; i < traj.agent_count(); ++i) {
        const auto p = traj.agent_desired(i, t_ref).position;
        c.circle({p.x(), p.y()}, r_px, i < 3 ? "fill=\"#1f77b4\"" : "fill=\"#555\"");
    }
    if (actual) {
        for (Point2 p : *actual) c.circle(p, r_px, "fill=\"none\" stroke=\"#2ca02c\"");
    }
    for (const Walker& w : s.env.walkers) c.circle(walker_position(w, t), 5.0, "fill=\"#9467bd\"");
    c.text(10, 20, "t = " + fmt(t) + " s", "font-size=\"14\"");
    return c.str();
}

}  // namespace cdswarm
