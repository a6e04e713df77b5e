#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "invariants.hpp"
#include "json.hpp"
#include "util.hpp"

namespace skelink {

namespace {

// Nearest-boundary oracle with far-field friendly queries: a kd-tree over
// subdivided boundary points provides an upper bound, then the owning edges of
// the in-range points are checked exactly.
class NearestBoundary {
public:
    explicit NearestBoundary(const Configuration& config) {
        for (size_t oi = 0; oi < config.size(); ++oi) {
            const Polygon& poly = config.objects[oi].vertices;
            size_t n = poly.size();
            for (size_t k = 0; k < n; ++k)
                edges_.push_back({poly[k], poly[(k + 1) % n], (int)oi});
        }
        double total = 0.0;
        for (const Edge& e : edges_) total += dist(e.a, e.b);
        double step = total / 2048.0;
        for (size_t ei = 0; ei < edges_.size(); ++ei) {
            const Edge& e = edges_[ei];
            double len = dist(e.a, e.b);
            int pieces = std::max(1, (int)std::ceil(len / step));
            for (int k = 0; k <= pieces; ++k) {
                Vec2 p = e.a + (e.b - e.a) * ((double)k / pieces);
                pts_.push_back({p, (int)ei});
            }
        }
        max_gap_ = step;
        index_.resize(pts_.size());
        for (size_t i = 0; i < pts_.size(); ++i) index_[i] = (int)i;
        build(0, (int)pts_.size(), 0);
    }

    struct Result {
        double distance = std::numeric_limits<double>::max();
        Vec2 point;
        int object = -1;
    };

    Result query(const Vec2& p) const {
        double best = std::numeric_limits<double>::max();
        int best_pt = -1;
        nearest_pt(0, (int)pts_.size(), 0, p, best, best_pt);
        Result res;
        if (best_pt < 0) return res;
        // Candidate edges: owners of all sample points within the upper bound
        // (plus one subdivision gap, which covers the true nearest edge).
        double radius = best + max_gap_;
        cand_.clear();
        range_pts(0, (int)pts_.size(), 0, p, radius);
        int last_edge = -1;
        for (int pi : cand_) {
            int ei = pts_[pi].edge;
            if (ei == last_edge) continue;
            last_edge = ei;
            Vec2 q = nearest_point_on_segment(p, edges_[ei].a, edges_[ei].b);
            double d = dist(p, q);
            if (d < res.distance) {
                res.distance = d;
                res.point = q;
                res.object = edges_[ei].object;
            }
        }
        return res;
    }

private:
    struct Edge {
        Vec2 a, b;
        int object;
    };
    struct Pt {
        Vec2 p;
        int edge;
    };

    void build(int lo, int hi, int axis) {
        if (hi - lo <= 8) return;
        int mid = (lo + hi) / 2;
        std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                         [&](int a, int b) {
                             return axis == 0 ? pts_[a].p.x < pts_[b].p.x
                                              : pts_[a].p.y < pts_[b].p.y;
                         });
        build(lo, mid, axis ^ 1);
        build(mid + 1, hi, axis ^ 1);
    }

    void nearest_pt(int lo, int hi, int axis, const Vec2& q, double& best, int& best_pt) const {
        if (hi <= lo) return;
        if (hi - lo <= 8) {
            for (int k = lo; k < hi; ++k) {
                double d = dist(pts_[index_[k]].p, q);
                if (d < best) {
                    best = d;
                    best_pt = index_[k];
                }
            }
            return;
        }
        int mid = (lo + hi) / 2;
        const Vec2& mp = pts_[index_[mid]].p;
        double dm = dist(mp, q);
        if (dm < best) {
            best = dm;
            best_pt = index_[mid];
        }
        double delta = axis == 0 ? q.x - mp.x : q.y - mp.y;
        int first_lo = delta < 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            bool go_lo = (pass == 0) == (first_lo != 0);
            if (pass == 1 && std::abs(delta) > best) break;
            if (go_lo)
                nearest_pt(lo, mid, axis ^ 1, q, best, best_pt);
            else
                nearest_pt(mid + 1, hi, axis ^ 1, q, best, best_pt);
        }
    }

    void range_pts(int lo, int hi, int axis, const Vec2& q, double radius) const {
        if (hi <= lo) return;
        if (hi - lo <= 8) {
            for (int k = lo; k < hi; ++k)
                if (dist(pts_[index_[k]].p, q) <= radius) cand_.push_back(index_[k]);
            return;
        }
        int mid = (lo + hi) / 2;
        const Vec2& mp = pts_[index_[mid]].p;
        if (dist(mp, q) <= radius) cand_.push_back(index_[mid]);
        double delta = axis == 0 ? q.x - mp.x : q.y - mp.y;
        if (delta - radius <= 0.0) range_pts(lo, mid, axis ^ 1, q, radius);
        if (delta + radius >= 0.0) range_pts(mid + 1, hi, axis ^ 1, q, radius);
    }

    std::vector<Edge> edges_;
    std::vector<Pt> pts_;
    std::vector<int> index_;
    double max_gap_ = 0.0;
    mutable std::vector<int> cand_;
};

// Foot-point map: boundary arc -> linking label, shared from the skeletal
// structure for interior attribution only.
class FootMap {
public:
    FootMap(const SkeletalStructure& sk, const ObjectLinks& links) {
        const ResampledBoundary& rb = sk.boundary;
        for (size_t si = 0; si < sk.strata.size(); ++si)
            for (size_t k = 0; k < sk.strata[si].samples.size(); ++k)
                for (int side = 0; side < 2; ++side) {
                    const SideRecord& rec = sk.strata[si].samples[k].side[side];
                    if (!rec.valid) continue;
                    const SideLink& link = links.strata[si].sides[k][side];
                    entries_.push_back({rec.foot_arc, (uint8_t)link.kind, link.target});
                }
        for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
            const Fan& fan = sk.fans[fi];
            if (fan.r <= 0.0) continue;
            for (const FanDirLink& d : links.fans[fi].dirs) {
                Vec2 foot = fan.center + d.dir * fan.r;
                entries_.push_back({arc_of(rb, foot), (uint8_t)d.link.kind, d.link.target});
            }
        }
        std::sort(entries_.begin(), entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.arc < b.arc; });
        perimeter_ = rb.perimeter;
    }

    std::pair<uint8_t, int> lookup(double arc) const {
        if (entries_.empty()) return {2, -1};
        auto it = std::lower_bound(entries_.begin(), entries_.end(), arc,
                                   [](const Entry& e, double a) { return e.arc < a; });
        size_t hi = (it == entries_.end()) ? 0 : it - entries_.begin();
        size_t lo = (hi + entries_.size() - 1) % entries_.size();
        double dlo = cyc(entries_[lo].arc - arc);
        double dhi = cyc(entries_[hi].arc - arc);
        const Entry& e = dlo <= dhi ? entries_[lo] : entries_[hi];
        return {e.tkind, e.target};
    }

private:
    struct Entry {
        double arc;
        uint8_t tkind;
        int target;
    };

    double cyc(double d) const {
        d = std::fmod(std::abs(d), perimeter_);
        return std::min(d, perimeter_ - d);
    }

    static double arc_of(const ResampledBoundary& rb, const Vec2& p) {
        double best = std::numeric_limits<double>::max();
        double best_arc = 0.0;
        size_t n = rb.polygon.size();
        for (size_t i = 0; i < n; ++i) {
            Vec2 q = nearest_point_on_segment(p, rb.polygon[i], rb.polygon[(i + 1) % n]);
            double d = dist(p, q);
            if (d < best) {
                best = d;
                best_arc = rb.vertex_arc[i] + dist(rb.polygon[i], q);
            }
        }
        return best_arc;
    }

    std::vector<Entry> entries_;
    double perimeter_ = 1.0;
};

}  // namespace

OracleGrid grid_labels(const Configuration& config, const BoundingRegion& bounding,
                       int resolution, const std::vector<SkeletalStructure>& skeletons,
                       const LinkingAssignment& assignment) {
    if (resolution < 256) throw InputError("oracle resolution must be >= 256");

    Box domain;
    if (bounding.has_boundary())
        domain = polygon_bbox(bounding.boundary);
    else {
        for (const Contour& c : config.objects)
            for (const Vec2& p : c.vertices) domain.expand(p);
        domain.dilate(bounding.tau);
    }

    OracleGrid grid;
    double extent = std::max(domain.width(), domain.height());
    grid.cell = extent / resolution;
    grid.nx = std::max(1, (int)std::ceil(domain.width() / grid.cell - 1e-9));
    grid.ny = std::max(1, (int)std::ceil(domain.height() / grid.cell - 1e-9));
    grid.origin = domain.lo;
    grid.cells.assign((size_t)grid.nx * grid.ny, {});

    NearestBoundary nb(config);
    std::vector<FootMap> foot_maps;
    for (size_t oi = 0; oi < config.size(); ++oi)
        foot_maps.emplace_back(skeletons[oi], assignment.objects[oi]);

    double diam = domain.diameter();
    double eps = 1e-9 * diam;
    double bisect_tol = 1e-10 * std::max(1.0, diam);

    parallel_for(0, grid.ny, [&](int64_t iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            OracleGrid::CellLabel& cl = grid.cells[(size_t)iy * grid.nx + ix];
            Vec2 p{grid.origin.x + (ix + 0.5) * grid.cell, grid.origin.y + (iy + 0.5) * grid.cell};

            if (bounding.has_boundary() && !point_in_polygon(p, bounding.boundary)) {
                cl.kind = OracleGrid::OutsideBounding;
                continue;
            }
            auto hit = nb.query(p);
            if (hit.object < 0) continue;
            if (!bounding.has_boundary() && hit.distance > bounding.tau) {
                cl.kind = OracleGrid::OutsideBounding;
                continue;
            }

            const Polygon& owner = config.objects[hit.object].vertices;
            if (hit.distance < eps || point_in_polygon(p, owner)) {
                cl.kind = OracleGrid::InsideObject;
                cl.object = (int16_t)hit.object;
                double arc = 0.0;
                {
                    const ResampledBoundary& rb = skeletons[hit.object].boundary;
                    size_t n = rb.polygon.size();
                    double best = std::numeric_limits<double>::max();
                    for (size_t i = 0; i < n; ++i) {
                        Vec2 q = nearest_point_on_segment(hit.point, rb.polygon[i],
                                                          rb.polygon[(i + 1) % n]);
                        double d = dist(hit.point, q);
                        if (d < best) {
                            best = d;
                            arc = rb.vertex_arc[i] + dist(rb.polygon[i], q);
                        }
                    }
                }
                auto [tkind, target] = foot_maps[hit.object].lookup(arc);
                cl.tkind = tkind;
                cl.target = (int16_t)target;
                continue;
            }

            // Exterior: continue the ray from the foot through the cell center.
            cl.kind = OracleGrid::Exterior;
            cl.object = (int16_t)hit.object;
            Vec2 e = (p - hit.point) / hit.distance;
            Vec2 b = hit.point;

            double t_exit;
            if (!bounding.has_boundary()) {
                t_exit = bounding.tau;
            } else {
                t_exit = std::numeric_limits<double>::max();
                const Polygon& bp = bounding.boundary;
                for (size_t k = 0; k < bp.size(); ++k) {
                    auto t = ray_segment_intersection(b, e, bp[k], bp[(k + 1) % bp.size()]);
                    if (t && *t > hit.distance && *t < t_exit) t_exit = *t;
                }
                if (t_exit == std::numeric_limits<double>::max()) t_exit = hit.distance;
            }

            // f(t) = nearest distance - t is 0 until the nearest feature
            // changes and non-increasing, so a single bisection on [d, t_exit]
            // finds the first change.
            auto f = [&](double t) { return nb.query(b + e * t).distance - t; };
            if (f(t_exit * (1.0 - 1e-12)) >= -eps) {
                cl.tkind = 2;  // Infinity
                cl.target = -1;
                continue;
            }
            double lo = hit.distance, hi = t_exit;
            while (hi - lo > bisect_tol) {
                double mid = 0.5 * (lo + hi);
                if (f(mid) < -eps)
                    hi = mid;
                else
                    lo = mid;
            }
            double probe_t = hi + std::max(1e-7 * diam, 4.0 * bisect_tol);
            auto competitor = nb.query(b + e * probe_t);
            if (competitor.object == hit.object) {
                cl.tkind = 1;  // SelfLink
                cl.target = (int16_t)hit.object;
            } else {
                cl.tkind = 0;  // Object
                cl.target = (int16_t)competitor.object;
            }
        }
    });
    return grid;
}

VolumeTable oracle_volumes(const OracleGrid& grid, const Configuration& config) {
    VolumeTable table;
    int n = (int)config.size();
    table.object_count = n;
    table.object_volume.assign(n, 0.0);
    table.object_shoelace.assign(n, 0.0);
    table.object_steiner.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        table.object_shoelace[i] = polygon_area(config.objects[i].vertices);

    std::map<RegionKey, VolumeRow> acc;
    auto row_for = [&](int object, uint8_t tkind, int target) -> VolumeRow& {
        RegionKey key;
        key.object = object;
        key.kind = (LinkTarget)tkind;
        key.target = (LinkTarget)tkind == LinkTarget::Infinity ? -1 : target;
        auto it = acc.find(key);
        if (it == acc.end()) {
            VolumeRow row;
            row.object = key.object;
            row.kind = key.kind;
            row.target = key.target;
            it = acc.emplace(key, row).first;
        }
        return it->second;
    };

    double a = grid.cell_area();
    for (const auto& cl : grid.cells) {
        if (cl.kind == OracleGrid::InsideObject) {
            table.object_volume[cl.object] += a;
            row_for(cl.object, cl.tkind, cl.target).vol_omega += a;
        } else if (cl.kind == OracleGrid::Exterior) {
            table.object_steiner[cl.object] += a;
            row_for(cl.object, cl.tkind, cl.target).vol_n += a;
        }
    }
    for (auto& [key, row] : acc) {
        row.vol_r = row.vol_omega + row.vol_n;
        table.rows.push_back(row);
    }
    return table;
}

namespace {

int label_code(const OracleGrid::CellLabel& cl, int nobj) {
    if (cl.kind == OracleGrid::OutsideBounding) return 0;
    if (cl.kind == OracleGrid::InsideObject) return 1 + cl.object;
    int base = 1 + nobj;
    int t = cl.tkind == 0 ? (cl.target + 2) : (cl.tkind == 1 ? 1 : 0);
    return base + cl.object * 32 + t;  // supports up to 30 objects
}

}  // namespace

std::string grid_raster_pgm(const OracleGrid& grid) {
    int nobj = 0;
    for (const auto& cl : grid.cells)
        if (cl.kind != OracleGrid::OutsideBounding) nobj = std::max(nobj, cl.object + 1);
    std::map<int, int> codes;
    for (const auto& cl : grid.cells) {
        int c = label_code(cl, nobj);
        if (!codes.count(c)) codes.emplace(c, 0);
    }
    int next = 0;
    for (auto& [raw, compact] : codes) compact = next++;

    std::ostringstream os;
    os << "P5\n" << grid.nx << " " << grid.ny << "\n255\n";
    std::string data;
    data.reserve((size_t)grid.nx * grid.ny);
    double scale = codes.size() > 1 ? 255.0 / (codes.size() - 1) : 0.0;
    for (int iy = grid.ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            int compact = codes[label_code(grid.at(ix, iy), nobj)];
            data.push_back((char)(uint8_t)std::lround(compact * scale));
        }
    os << data;
    return os.str();
}

std::string grid_legend_json(const OracleGrid& grid) {
    int nobj = 0;
    for (const auto& cl : grid.cells)
        if (cl.kind != OracleGrid::OutsideBounding) nobj = std::max(nobj, cl.object + 1);
    std::map<int, std::string> names;
    for (const auto& cl : grid.cells) {
        int c = label_code(cl, nobj);
        if (names.count(c)) continue;
        std::ostringstream nm;
        if (cl.kind == OracleGrid::OutsideBounding)
            nm << "outside";
        else if (cl.kind == OracleGrid::InsideObject)
            nm << "inside_" << cl.object + 1;
        else {
            nm << "N_" << cl.object + 1 << "_";
            if (cl.tkind == 0)
                nm << cl.target + 1;
            else if (cl.tkind == 1)
                nm << "self";
            else
                nm << "inf";
        }
        names.emplace(c, nm.str());
    }
    nlohmann::ordered_json legend;
    legend["source"] = "oracle";
    int gray = 0;
    double scale = names.size() > 1 ? 255.0 / (names.size() - 1) : 0.0;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (auto& [code, name] : names) {
        nlohmann::ordered_json e;
        e["gray"] = (int)std::lround(gray * scale);
        e["label"] = name;
        entries.push_back(e);
        ++gray;
    }
    legend["entries"] = std::move(entries);
    return legend.dump(2);
}

}  // namespace skelink
