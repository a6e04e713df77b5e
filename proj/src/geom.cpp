#include "geom.hpp"

#include <algorithm>
#include <cassert>

namespace skelink {

double polygon_signed_area(const Polygon& poly) {
    double a = 0.0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += cross(p, q);
    }
    return 0.5 * a;
}

double polygon_area(const Polygon& poly) { return std::abs(polygon_signed_area(poly)); }

double polygon_perimeter(const Polygon& poly) {
    double L = 0.0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) L += dist(poly[i], poly[(i + 1) % n]);
    return L;
}

Box polygon_bbox(const Polygon& poly) {
    Box b;
    for (const Vec2& p : poly) b.expand(p);
    return b;
}

bool polygon_is_ccw(const Polygon& poly) { return polygon_signed_area(poly) > 0.0; }

bool point_in_polygon(const Vec2& p, const Polygon& poly) {
    // Crossing-number test on the horizontal ray to +x.
    bool inside = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

bool polygon_is_simple(const Polygon& poly) {
    size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        size_t i2 = (i + 1) % n;
        for (size_t j = i + 1; j < n; ++j) {
            size_t j2 = (j + 1) % n;
            if (i == j || i2 == j || i == j2) continue;  // adjacent edges share a vertex
            if (segments_intersect(poly[i], poly[i2], poly[j], poly[j2])) return false;
        }
    }
    return true;
}

Vec2 nearest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = norm2(ab);
    if (len2 <= 0.0) return a;
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return a + ab * t;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    return dist(p, nearest_point_on_segment(p, a, b));
}

double dist_segment_segment(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    if (segments_intersect(a0, a1, b0, b1)) return 0.0;
    double d = dist_point_segment(a0, b0, b1);
    d = std::min(d, dist_point_segment(a1, b0, b1));
    d = std::min(d, dist_point_segment(b0, a0, a1));
    d = std::min(d, dist_point_segment(b1, a0, a1));
    return d;
}

static int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    double v = cross(b - a, c - a);
    double scale = std::abs(b.x - a.x) + std::abs(b.y - a.y) + std::abs(c.x - a.x) + std::abs(c.y - a.y);
    double eps = 1e-14 * scale * scale;
    if (v > eps) return 1;
    if (v < -eps) return -1;
    return 0;
}

static bool on_segment_collinear(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) - 1e-14 <= p.x && p.x <= std::max(a.x, b.x) + 1e-14 &&
           std::min(a.y, b.y) - 1e-14 <= p.y && p.y <= std::max(a.y, b.y) + 1e-14;
}

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    int d1 = orient_sign(b0, b1, a0);
    int d2 = orient_sign(b0, b1, a1);
    int d3 = orient_sign(a0, a1, b0);
    int d4 = orient_sign(a0, a1, b1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment_collinear(b0, b1, a0)) return true;
    if (d2 == 0 && on_segment_collinear(b0, b1, a1)) return true;
    if (d3 == 0 && on_segment_collinear(a0, a1, b0)) return true;
    if (d4 == 0 && on_segment_collinear(a0, a1, b1)) return true;
    return false;
}

std::optional<double> ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                               const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double denom = cross(dir, ab);
    Vec2 ao = a - origin;
    if (std::abs(denom) < 1e-14 * (norm(dir) * norm(ab) + 1.0)) {
        // Near-parallel: accept only if collinear within tolerance.
        if (std::abs(cross(dir, ao)) > 1e-12 * (norm(ao) + 1.0)) return std::nullopt;
        double ta = dot(ao, dir) / norm2(dir);
        double tb = dot(b - origin, dir) / norm2(dir);
        double tmin = std::min(ta, tb), tmax = std::max(ta, tb);
        if (tmax < 0.0) return std::nullopt;
        return std::max(tmin, 0.0);
    }
    double t = cross(ao, ab) / denom;
    double s = cross(ao, dir) / denom;
    if (t >= 0.0 && s >= -1e-12 && s <= 1.0 + 1e-12) return t;
    return std::nullopt;
}

std::vector<double> ray_polygon_crossings(const Vec2& origin, const Vec2& dir,
                                          const Polygon& poly, double tmin) {
    std::vector<double> ts;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        auto t = ray_segment_intersection(origin, dir, poly[i], poly[(i + 1) % n]);
        if (t && *t >= tmin) ts.push_back(*t);
    }
    std::sort(ts.begin(), ts.end());
    // Merge duplicate hits at shared vertices.
    std::vector<double> out;
    for (double t : ts) {
        if (out.empty() || t - out.back() > 1e-12 * (1.0 + std::abs(t))) out.push_back(t);
    }
    return out;
}

std::vector<std::pair<double, double>> ray_polygon_inside_intervals(
    const Vec2& origin, const Vec2& dir, const Polygon& poly, double t0, double t1) {
    std::vector<std::pair<double, double>> out;
    if (t1 <= t0) return out;
    std::vector<double> ts = ray_polygon_crossings(origin, dir, poly, 0.0);
    std::vector<double> cuts;
    cuts.push_back(t0);
    for (double t : ts)
        if (t > t0 && t < t1) cuts.push_back(t);
    cuts.push_back(t1);
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        if (point_in_polygon(origin + dir * mid, poly)) out.emplace_back(cuts[k], cuts[k + 1]);
    }
    // Coalesce adjacent intervals.
    std::vector<std::pair<double, double>> merged;
    for (auto& iv : out) {
        if (!merged.empty() && std::abs(merged.back().second - iv.first) < 1e-12)
            merged.back().second = iv.second;
        else
            merged.push_back(iv);
    }
    return merged;
}

Polygon convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) k--;
        h[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) k--;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

Polygon dilate_convex_polygon(const Polygon& hull, double radius, double max_corner_step) {
    if (radius <= 0.0 || hull.size() < 3) return hull;
    size_t n = hull.size();
    Polygon out;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& prev = hull[(i + n - 1) % n];
        const Vec2& cur = hull[i];
        const Vec2& next = hull[(i + 1) % n];
        Vec2 n0 = normalized(perp(cur - prev)) * -1.0;  // outward normal for CCW
        Vec2 n1 = normalized(perp(next - cur)) * -1.0;
        double a0 = angle_of(n0);
        double a1 = angle_of(n1);
        while (a1 < a0) a1 += 2.0 * M_PI;
        int steps = std::max(1, (int)std::ceil((a1 - a0) / max_corner_step));
        for (int k = 0; k <= steps; ++k) {
            double a = a0 + (a1 - a0) * k / steps;
            out.push_back(cur + dir_of(a) * radius);
        }
    }
    return out;
}

double polygon_boundary_distance(const Polygon& a, const Polygon& b) {
    double best = std::numeric_limits<double>::max();
    size_t na = a.size(), nb = b.size();
    for (size_t i = 0; i < na; ++i) {
        for (size_t j = 0; j < nb; ++j) {
            best = std::min(best, dist_segment_segment(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

void SegmentGrid::add(const Vec2& a, const Vec2& b, int payload) {
    segs_.emplace_back(a, b);
    payloads_.push_back(payload);
    bbox_.expand(a);
    bbox_.expand(b);
    built_ = false;
}

void SegmentGrid::build() {
    size_t n = segs_.size();
    if (n == 0) { built_ = true; nx_ = ny_ = 0; return; }
    double maxlen = 0.0, total = 0.0;
    for (auto& s : segs_) {
        double l = dist(s.first, s.second);
        maxlen = std::max(maxlen, l);
        total += l;
    }
    double avg = total / n;
    cell_ = std::max({avg * 2.0, maxlen * 0.51, bbox_.diameter() * 1e-6, 1e-12});
    nx_ = std::max(1, (int)std::ceil(bbox_.width() / cell_) + 1);
    ny_ = std::max(1, (int)std::ceil(bbox_.height() / cell_) + 1);
    // Keep the grid memory bounded for skewed inputs.
    while ((int64_t)nx_ * ny_ > (int64_t)(16 * n + 4096)) {
        cell_ *= 1.5;
        nx_ = std::max(1, (int)std::ceil(bbox_.width() / cell_) + 1);
        ny_ = std::max(1, (int)std::ceil(bbox_.height() / cell_) + 1);
    }
    buckets_.assign((size_t)nx_ * ny_, {});
    for (size_t i = 0; i < n; ++i) {
        Box sb;
        sb.expand(segs_[i].first);
        sb.expand(segs_[i].second);
        int x0 = std::clamp((int)((sb.lo.x - bbox_.lo.x) / cell_), 0, nx_ - 1);
        int x1 = std::clamp((int)((sb.hi.x - bbox_.lo.x) / cell_), 0, nx_ - 1);
        int y0 = std::clamp((int)((sb.lo.y - bbox_.lo.y) / cell_), 0, ny_ - 1);
        int y1 = std::clamp((int)((sb.hi.y - bbox_.lo.y) / cell_), 0, ny_ - 1);
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix) buckets_[bucket_of(ix, iy)].push_back((int)i);
    }
    built_ = true;
}

void SegmentGrid::cell_range(const Vec2& p, double radius, int& x0, int& x1, int& y0, int& y1) const {
    x0 = std::clamp((int)((p.x - radius - bbox_.lo.x) / cell_), 0, nx_ - 1);
    x1 = std::clamp((int)((p.x + radius - bbox_.lo.x) / cell_), 0, nx_ - 1);
    y0 = std::clamp((int)((p.y - radius - bbox_.lo.y) / cell_), 0, ny_ - 1);
    y1 = std::clamp((int)((p.y + radius - bbox_.lo.y) / cell_), 0, ny_ - 1);
}

SegmentGrid::Hit SegmentGrid::nearest(const Vec2& p) const {
    assert(built_);
    Hit best;
    if (segs_.empty()) return best;
    // Expanding ring search; once a hit is found, one more ring guarantees correctness.
    int cx = std::clamp((int)((p.x - bbox_.lo.x) / cell_), 0, nx_ - 1);
    int cy = std::clamp((int)((p.y - bbox_.lo.y) / cell_), 0, ny_ - 1);
    int max_ring = std::max(nx_, ny_);
    int found_ring = -1;
    for (int ring = 0; ring <= max_ring; ++ring) {
        if (found_ring >= 0 && ring > found_ring + 1) break;
        bool any_cell = false;
        for (int iy = cy - ring; iy <= cy + ring; ++iy) {
            if (iy < 0 || iy >= ny_) continue;
            for (int ix = cx - ring; ix <= cx + ring; ++ix) {
                if (ix < 0 || ix >= nx_) continue;
                if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
                any_cell = true;
                for (int si : buckets_[bucket_of(ix, iy)]) {
                    Vec2 q = nearest_point_on_segment(p, segs_[si].first, segs_[si].second);
                    double d = dist(p, q);
                    if (d < best.distance) {
                        best.distance = d;
                        best.point = q;
                        best.segment = si;
                    }
                }
            }
        }
        if (best.segment >= 0 && found_ring < 0) {
            found_ring = ring;
            // The ring distance bound: segments in rings beyond
            // found_ring+1+ceil(best/cell) cannot beat the current best.
            max_ring = std::min(max_ring, ring + 1 + (int)std::ceil(best.distance / cell_));
        }
        if (!any_cell && ring > 0 && found_ring >= 0) break;
    }
    return best;
}

std::vector<int> SegmentGrid::within(const Vec2& p, double radius) const {
    assert(built_);
    std::vector<int> out;
    if (segs_.empty()) return out;
    int x0, x1, y0, y1;
    cell_range(p, radius, x0, x1, y0, y1);
    std::vector<char> seen(segs_.size(), 0);
    for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix)
            for (int si : buckets_[bucket_of(ix, iy)]) {
                if (seen[si]) continue;
                seen[si] = 1;
                if (dist_point_segment(p, segs_[si].first, segs_[si].second) <= radius)
                    out.push_back(si);
            }
    return out;
}

}  // namespace skelink
