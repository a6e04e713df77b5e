#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace skelink {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& v) { return dot(v, v); }
inline double norm(const Vec2& v) { return std::sqrt(norm2(v)); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }  // rotate +90 degrees

inline Vec2 normalized(const Vec2& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

// Angle of v in (-pi, pi].
inline double angle_of(const Vec2& v) { return std::atan2(v.y, v.x); }

// Unsigned angle between unit-ish vectors, in [0, pi].
inline double angle_between(const Vec2& a, const Vec2& b) {
    double c = dot(a, b) / std::max(norm(a) * norm(b), 1e-300);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

inline Vec2 dir_of(double theta) { return {std::cos(theta), std::sin(theta)}; }

struct Box {
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

    void expand(const Vec2& p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    void expand(const Box& b) { expand(b.lo); expand(b.hi); }
    void dilate(double m) { lo.x -= m; lo.y -= m; hi.x += m; hi.y += m; }
    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double diameter() const { return dist(lo, hi); }
    bool contains(const Vec2& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
};

using Polyline = std::vector<Vec2>;
using Polygon = std::vector<Vec2>;  // closed, last->first edge implied

double polygon_signed_area(const Polygon& poly);
double polygon_area(const Polygon& poly);
double polygon_perimeter(const Polygon& poly);
Box polygon_bbox(const Polygon& poly);
bool polygon_is_ccw(const Polygon& poly);

// Strict interior test (points on the boundary count as outside).
bool point_in_polygon(const Vec2& p, const Polygon& poly);

// True if the closed polyline has no self-intersections (O(n^2)).
bool polygon_is_simple(const Polygon& poly);

Vec2 nearest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double dist_segment_segment(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

// Proper or touching intersection of segments [a0,a1] and [b0,b1].
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

// Intersection of the ray origin + t*dir (t >= 0) with segment [a,b].
// Returns the ray parameter t, or nullopt. On near-parallel overlap returns the
// nearest endpoint hit.
std::optional<double> ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                               const Vec2& a, const Vec2& b);

// All parameters t >= tmin at which the ray crosses the polygon boundary, sorted.
std::vector<double> ray_polygon_crossings(const Vec2& origin, const Vec2& dir,
                                          const Polygon& poly, double tmin = 0.0);

// Intervals of t in [t0,t1] where origin + t*dir lies inside the polygon.
std::vector<std::pair<double, double>> ray_polygon_inside_intervals(
    const Vec2& origin, const Vec2& dir, const Polygon& poly, double t0, double t1);

// Andrew monotone chain; collinear points dropped; result CCW.
Polygon convex_hull(std::vector<Vec2> pts);

// Minkowski dilation of a convex CCW polygon by a disk of the given radius,
// corners rounded with at most max_corner_step radians per arc segment.
Polygon dilate_convex_polygon(const Polygon& hull, double radius, double max_corner_step = 0.2);

// Minimum distance between two polygon boundaries (0 if they intersect).
double polygon_boundary_distance(const Polygon& a, const Polygon& b);

// Uniform-bucket index over a set of segments for nearest-feature queries.
class SegmentGrid {
public:
    struct Hit {
        double distance = std::numeric_limits<double>::max();
        Vec2 point;       // nearest point on the segment
        int segment = -1; // index passed to add()
    };

    SegmentGrid() = default;
    void add(const Vec2& a, const Vec2& b, int payload);
    // Must be called after all add()s and before queries.
    void build();

    Hit nearest(const Vec2& p) const;
    // All segments within the given radius (may contain duplicates-free list of indices).
    std::vector<int> within(const Vec2& p, double radius) const;

    const std::pair<Vec2, Vec2>& segment(int idx) const { return segs_[idx]; }
    int payload(int idx) const { return payloads_[idx]; }
    size_t size() const { return segs_.size(); }

private:
    std::vector<std::pair<Vec2, Vec2>> segs_;
    std::vector<int> payloads_;
    Box bbox_;
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;
    bool built_ = false;

    int bucket_of(int ix, int iy) const { return iy * nx_ + ix; }
    void cell_range(const Vec2& p, double radius, int& x0, int& x1, int& y0, int& y1) const;
};

}  // namespace skelink
