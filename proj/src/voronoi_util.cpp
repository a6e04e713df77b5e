#include "voronoi_util.hpp"

#include <algorithm>
#include <cmath>

#include <boost/polygon/voronoi.hpp>

#include "util.hpp"

namespace skelink {

namespace {

struct IntPoint {
    int32_t x, y;
};

}  // namespace
}  // namespace skelink

namespace boost::polygon {

template <>
struct geometry_concept<skelink::IntPoint> {
    typedef point_concept type;
};

template <>
struct point_traits<skelink::IntPoint> {
    typedef int32_t coordinate_type;
    static coordinate_type get(const skelink::IntPoint& p, orientation_2d orient) {
        return (orient == HORIZONTAL) ? p.x : p.y;
    }
};

}  // namespace boost::polygon

namespace skelink {

std::vector<VoronoiEdge> voronoi_edges(const std::vector<Vec2>& sites, const Box& clip) {
    std::vector<VoronoiEdge> out;
    if (sites.size() < 2) return out;

    Box sb;
    for (const Vec2& p : sites) sb.expand(p);
    double extent = std::max({sb.width(), sb.height(), 1e-300});
    // ~2^28 lattice across the spread keeps int64 products inside the
    // predicate range while making snapping error negligible.
    double scale = double(1 << 28) / extent;
    Vec2 center{0.5 * (sb.lo.x + sb.hi.x), 0.5 * (sb.lo.y + sb.hi.y)};

    std::vector<IntPoint> ipts(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) {
        ipts[i].x = (int32_t)std::llround((sites[i].x - center.x) * scale);
        ipts[i].y = (int32_t)std::llround((sites[i].y - center.y) * scale);
    }

    boost::polygon::voronoi_diagram<double> vd;
    boost::polygon::construct_voronoi(ipts.begin(), ipts.end(), &vd);

    auto unsnap = [&](double x, double y) {
        return Vec2{x / scale + center.x, y / scale + center.y};
    };
    double clip_radius = 2.0 * std::max(clip.diameter(), extent) + extent;

    for (const auto& edge : vd.edges()) {
        if (!edge.is_primary()) continue;
        // Each edge appears twice (half-edge pairs); keep one orientation.
        if (edge.twin() && edge.cell()->source_index() > edge.twin()->cell()->source_index())
            continue;

        int sa = (int)edge.cell()->source_index();
        int sb2 = (int)edge.twin()->cell()->source_index();

        VoronoiEdge ve;
        ve.site_a = sa;
        ve.site_b = sb2;

        if (edge.is_finite()) {
            ve.a = unsnap(edge.vertex0()->x(), edge.vertex0()->y());
            ve.b = unsnap(edge.vertex1()->x(), edge.vertex1()->y());
        } else {
            // Unbounded edge: extend from the finite endpoint (if any) along the
            // perpendicular bisector of the two sites.
            Vec2 pa = sites[sa], pb = sites[sb2];
            Vec2 mid = (pa + pb) * 0.5;
            Vec2 dir = normalized(perp(pb - pa));
            if (edge.vertex0()) {
                ve.a = unsnap(edge.vertex0()->x(), edge.vertex0()->y());
                // Orient away from the finite endpoint consistently with the
                // half-edge convention: the cell of site_a lies to the left.
                if (dot(dir, mid - ve.a) < 0.0) dir = dir * -1.0;
                ve.b = ve.a + dir * clip_radius;
                ve.clipped_b = true;
            } else if (edge.vertex1()) {
                ve.b = unsnap(edge.vertex1()->x(), edge.vertex1()->y());
                if (dot(dir, mid - ve.b) < 0.0) dir = dir * -1.0;
                ve.a = ve.b + dir * clip_radius;
                ve.clipped_a = true;
            } else {
                // Full line (two-site degenerate diagram).
                ve.a = mid - dir * clip_radius;
                ve.b = mid + dir * clip_radius;
                ve.clipped_a = ve.clipped_b = true;
            }
        }

        // Clip to the working box.
        Vec2 a = ve.a, b = ve.b;
        double t0 = 0.0, t1 = 1.0;
        Vec2 d = b - a;
        auto clip_axis = [&](double p, double q) {
            // Liang-Barsky: p*t <= q
            if (std::abs(p) < 1e-300) return q >= 0.0;
            double t = q / p;
            if (p < 0.0) {
                if (t > t1) return false;
                if (t > t0) t0 = t;
            } else {
                if (t < t0) return false;
                if (t < t1) t1 = t;
            }
            return true;
        };
        if (!clip_axis(-d.x, a.x - clip.lo.x)) continue;
        if (!clip_axis(d.x, clip.hi.x - a.x)) continue;
        if (!clip_axis(-d.y, a.y - clip.lo.y)) continue;
        if (!clip_axis(d.y, clip.hi.y - a.y)) continue;
        if (t1 <= t0) continue;
        Vec2 ca = a + d * t0;
        Vec2 cb = a + d * t1;
        if (t0 > 0.0) ve.clipped_a = true;
        if (t1 < 1.0) ve.clipped_b = true;
        ve.a = ca;
        ve.b = cb;
        if (dist(ve.a, ve.b) <= 0.0) continue;
        out.push_back(ve);
    }
    return out;
}

}  // namespace skelink
