#include "skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "util.hpp"
#include "voronoi_util.hpp"

namespace skelink {

double ResampledBoundary::cyclic_arc_distance(double a, double b) const {
    double d = std::fmod(std::abs(a - b), perimeter);
    return std::min(d, perimeter - d);
}

int ResampledBoundary::nearest_point_index(double arc) const {
    arc = std::fmod(arc, perimeter);
    if (arc < 0.0) arc += perimeter;
    auto it = std::lower_bound(pts.begin(), pts.end(), arc,
                               [](const BoundaryPoint& bp, double a) { return bp.arc < a; });
    int hi = (it == pts.end()) ? 0 : (int)(it - pts.begin());
    int lo = (hi + (int)pts.size() - 1) % (int)pts.size();
    double dlo = cyclic_arc_distance(pts[lo].arc, arc);
    double dhi = cyclic_arc_distance(pts[hi].arc, arc);
    return dlo <= dhi ? lo : hi;
}

double ResampledBoundary::curvature_at_arc(double arc, bool& at_corner) const {
    int idx = nearest_point_index(arc);
    const BoundaryPoint& bp = pts[idx];
    at_corner = bp.corner && cyclic_arc_distance(bp.arc, arc) < 0.25 * step;
    return bp.kappa_std;
}

Vec2 ResampledBoundary::outward_normal_at_arc(double arc) const {
    arc = std::fmod(arc, perimeter);
    if (arc < 0.0) arc += perimeter;
    size_t n = polygon.size();
    for (size_t i = 0; i < n; ++i) {
        double a0 = vertex_arc[i];
        double a1 = (i + 1 < n) ? vertex_arc[i + 1] : perimeter;
        if (arc >= a0 && arc <= a1) {
            Vec2 d = normalized(polygon[(i + 1) % n] - polygon[i]);
            return {d.y, -d.x};
        }
    }
    Vec2 d = normalized(polygon[0] - polygon[n - 1]);
    return {d.y, -d.x};
}

double medial_density(const Vec2& u, const Vec2& stratum_tangent) {
    Vec2 t = normalized(stratum_tangent);
    Vec2 n = perp(t);
    if (dot(n, u) < 0.0) n = n * -1.0;
    return dot(normalized(u), n);
}

double radial_curvature_from_boundary(double kappa_b, double r) {
    return kappa_b / (1.0 + r * kappa_b);
}

double boundary_curvature_from_radial(double kappa_r, double r) {
    return kappa_r / (1.0 - r * kappa_r);
}

double check_partial_blum(const ResampledBoundary& boundary, const Vec2& u, double foot_arc) {
    Vec2 n = boundary.outward_normal_at_arc(foot_arc);
    return angle_between(u, n);
}

ResampledBoundary resample_boundary(const Polygon& polygon, int samples, double corner_angle) {
    ResampledBoundary rb;
    rb.polygon = polygon;
    rb.perimeter = polygon_perimeter(polygon);
    size_t n = polygon.size();
    rb.step = rb.perimeter / std::max(samples, 8);

    rb.vertex_arc.resize(n);
    double arc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        rb.vertex_arc[i] = arc;
        arc += dist(polygon[i], polygon[(i + 1) % n]);
    }

    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % n];
        double len = dist(a, b);
        int pieces = std::max(1, (int)std::llround(len / rb.step));
        for (int k = 0; k < pieces; ++k) {
            double t = (double)k / pieces;
            BoundaryPoint bp;
            bp.p = a + (b - a) * t;
            bp.arc = rb.vertex_arc[i] + t * len;
            bp.polygon_vertex = (k == 0) ? (int)i : -1;
            rb.pts.push_back(bp);
        }
    }

    // Corner flags from the original polygon turn angles.
    for (BoundaryPoint& bp : rb.pts) {
        if (bp.polygon_vertex < 0) continue;
        size_t i = bp.polygon_vertex;
        Vec2 din = normalized(polygon[i] - polygon[(i + n - 1) % n]);
        Vec2 dout = normalized(polygon[(i + 1) % n] - polygon[i]);
        double turn = angle_between(din, dout);
        if (turn > corner_angle) {
            bp.corner = true;
            bp.reflex = cross(din, dout) < 0.0;
        }
    }

    // Signed curvature estimates; one-sided circumcircle fits combined with
    // minmod so curvature junctions do not smear across the joint.
    size_t m = rb.pts.size();
    auto circum_kappa = [&](size_t a, size_t b, size_t c) {
        const Vec2& p1 = rb.pts[a].p;
        const Vec2& p2 = rb.pts[b].p;
        const Vec2& p3 = rb.pts[c].p;
        double cr = cross(p2 - p1, p3 - p2);
        double d12 = dist(p1, p2), d23 = dist(p2, p3), d13 = dist(p1, p3);
        double denom = d12 * d23 * d13;
        if (denom < 1e-300) return 0.0;
        return 2.0 * cr / denom;
    };
    for (size_t i = 0; i < m; ++i) {
        if (rb.pts[i].corner) { rb.pts[i].kappa_std = 0.0; continue; }
        double km = circum_kappa((i + m - 2) % m, (i + m - 1) % m, i);
        double kp = circum_kappa(i, (i + 1) % m, (i + 2) % m);
        if (km * kp <= 0.0)
            rb.pts[i].kappa_std = 0.0;
        else
            rb.pts[i].kappa_std = (std::abs(km) < std::abs(kp)) ? km : kp;
    }
    return rb;
}

namespace {

struct GraphNode {
    Vec2 p;
    std::vector<int> edges;
};

struct GraphEdge {
    int n0 = -1, n1 = -1;
    int site_a = -1, site_b = -1;
    double subtense = 0.0;  // angle the two sites subtend at the edge midpoint
    bool removed = false;
};

struct SkelGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    int degree(int node) const {
        int d = 0;
        for (int e : nodes[node].edges)
            if (!edges[e].removed) ++d;
        return d;
    }
    int other(int e, int node) const { return edges[e].n0 == node ? edges[e].n1 : edges[e].n0; }
};

struct NodeKey {
    int64_t qx, qy;
    bool operator<(const NodeKey& o) const {
        return qx < o.qx || (qx == o.qx && qy < o.qy);
    }
};

SkelGraph build_graph(const std::vector<VoronoiEdge>& ves, const std::vector<Vec2>& sites,
                      double quant) {
    SkelGraph g;
    std::map<NodeKey, int> index;
    auto node_of = [&](const Vec2& p) {
        NodeKey k{(int64_t)std::llround(p.x / quant), (int64_t)std::llround(p.y / quant)};
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        int id = (int)g.nodes.size();
        g.nodes.push_back({p, {}});
        index.emplace(k, id);
        return id;
    };
    for (const VoronoiEdge& ve : ves) {
        GraphEdge e;
        e.n0 = node_of(ve.a);
        e.n1 = node_of(ve.b);
        if (e.n0 == e.n1) continue;
        e.site_a = ve.site_a;
        e.site_b = ve.site_b;
        Vec2 mid = (ve.a + ve.b) * 0.5;
        e.subtense = angle_between(sites[ve.site_a] - mid, sites[ve.site_b] - mid);
        int id = (int)g.edges.size();
        g.edges.push_back(e);
        g.nodes[e.n0].edges.push_back(id);
        g.nodes[e.n1].edges.push_back(id);
    }
    return g;
}

// Iterative leaf pruning: remove leaf edges whose foot subtense is below
// theta_min until stable. Returns the number of removed edges.
int prune_spurs(SkelGraph& g, double theta_min) {
    int removed = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t e = 0; e < g.edges.size(); ++e) {
            GraphEdge& ge = g.edges[e];
            if (ge.removed || ge.subtense >= theta_min) continue;
            if (g.degree(ge.n0) == 1 || g.degree(ge.n1) == 1) {
                ge.removed = true;
                ++removed;
                changed = true;
            }
        }
    }
    return removed;
}

}  // namespace

SkeletalStructure compute_skeleton(const Contour& contour, const SkeletonParams& params) {
    SkeletalStructure sk;
    const Polygon& poly = contour.vertices;
    sk.shoelace_area = polygon_area(poly);
    sk.boundary = resample_boundary(poly, params.samples_per_boundary, params.corner_angle);
    const ResampledBoundary& rb = sk.boundary;

    std::vector<Vec2> sites;
    sites.reserve(rb.pts.size());
    for (const BoundaryPoint& bp : rb.pts) sites.push_back(bp.p);

    Box clip = polygon_bbox(poly);
    clip.dilate(0.05 * clip.diameter() + rb.step);
    std::vector<VoronoiEdge> ves = voronoi_edges(sites, clip);

    SegmentGrid pgrid;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) pgrid.add(poly[i], poly[(i + 1) % n], (int)i);
    pgrid.build();

    // Interior Voronoi edges only.
    std::vector<VoronoiEdge> interior;
    for (const VoronoiEdge& ve : ves) {
        if (ve.clipped_a || ve.clipped_b) continue;
        Vec2 mid = (ve.a + ve.b) * 0.5;
        if (point_in_polygon(ve.a, poly) && point_in_polygon(ve.b, poly) &&
            point_in_polygon(mid, poly))
            interior.push_back(ve);
    }

    double quant = std::max(rb.perimeter * 1e-12, 1e-12);
    SkelGraph g = build_graph(interior, sites, quant);
    sk.pruned_edges = prune_spurs(g, params.theta_min);

    // Collect surviving strata as chains between non-degree-2 nodes.
    std::vector<std::vector<int>> chains;  // node index paths
    std::vector<std::vector<std::pair<int, int>>> chain_sites;  // per chain edge: site pair
    {
        std::vector<char> visited(g.edges.size(), 0);
        auto walk = [&](int start_node, int first_edge) {
            std::vector<int> path{start_node};
            std::vector<std::pair<int, int>> spath;
            int node = start_node, e = first_edge;
            while (true) {
                visited[e] = 1;
                spath.emplace_back(g.edges[e].site_a, g.edges[e].site_b);
                node = g.other(e, node);
                path.push_back(node);
                if (g.degree(node) != 2) break;
                int next = -1;
                for (int cand : g.nodes[node].edges)
                    if (!g.edges[cand].removed && !visited[cand]) { next = cand; break; }
                if (next < 0) break;
                e = next;
            }
            chains.push_back(std::move(path));
            chain_sites.push_back(std::move(spath));
        };
        for (size_t ni = 0; ni < g.nodes.size(); ++ni) {
            if (g.degree((int)ni) == 2 || g.degree((int)ni) == 0) continue;
            for (int e : g.nodes[ni].edges)
                if (!g.edges[e].removed && !visited[e]) walk((int)ni, e);
        }
        // Pure cycles (no junction nodes) — should not occur for simple contours.
        for (size_t e = 0; e < g.edges.size(); ++e)
            if (!g.edges[e].removed && !visited[e]) walk(g.edges[e].n0, (int)e);
    }

    // Degenerate case: everything pruned (disk-like). Fall back to the deepest
    // interior vertex carrying the full angular fan.
    if (chains.empty()) {
        int best = -1;
        double best_r = 0.0;
        for (size_t ni = 0; ni < g.nodes.size(); ++ni) {
            double r = pgrid.nearest(g.nodes[ni].p).distance;
            if (r > best_r) { best_r = r; best = (int)ni; }
        }
        if (best < 0) {
            // No interior vertices at all; try the polygon centroid.
            Vec2 c{0, 0};
            for (const Vec2& p : poly) c += p;
            c = c / (double)poly.size();
            if (!point_in_polygon(c, poly))
                throw InputError("contour too thin for resolution: skeleton empty after pruning");
            best_r = pgrid.nearest(c).distance;
            sk.fans.push_back({c, best_r, 0.0, 2.0 * M_PI, false, -1});
        } else {
            sk.fans.push_back({g.nodes[best].p, best_r, 0.0, 2.0 * M_PI, false, -1});
        }
        sk.strata.clear();
        return sk;
    }

    // Corner extension: leaves whose pruning stopped near a sharp convex corner
    // are continued to the exact corner (the radius runs to 0 there).
    struct ChainEnd { int chain; int end; };  // end: 0 = front, 1 = back
    auto leaf_node = [&](int chain, int end) {
        return end == 0 ? chains[chain].front() : chains[chain].back();
    };
    std::vector<std::pair<bool, int>> corner_ext(chains.size() * 2, {false, -1});
    for (size_t c = 0; c < chains.size(); ++c) {
        for (int end = 0; end < 2; ++end) {
            int node = leaf_node((int)c, end);
            if (g.degree(node) != 1) continue;
            const Vec2& lp = g.nodes[node].p;
            int best_vtx = -1;
            double best_d = std::numeric_limits<double>::max();
            for (size_t vi = 0; vi < n; ++vi) {
                int pi = rb.nearest_point_index(rb.vertex_arc[vi]);
                if (!rb.pts[pi].corner || rb.pts[pi].reflex) continue;
                double d = dist(lp, poly[vi]);
                if (d < best_d) { best_d = d; best_vtx = (int)vi; }
            }
            if (best_vtx < 0) continue;
            double leaf_r = pgrid.nearest(lp).distance;
            if (best_d > std::max(4.0 * rb.step, 1.5 * leaf_r)) continue;
            Vec2 mid = (lp + poly[best_vtx]) * 0.5;
            if (!point_in_polygon(mid, poly)) continue;
            corner_ext[c * 2 + end] = {true, best_vtx};
        }
    }

    // Assemble strata with per-sample side records.
    auto side_foot = [&](const Vec2& x, int site_hint) {
        // Exact projection against the polygon segments within a small arc
        // window around the hint site.
        double arc0 = rb.pts[site_hint].arc;
        double window = 3.0 * rb.step;
        Vec2 best_foot = rb.pts[site_hint].p;
        double best_d = dist(x, best_foot);
        double best_arc = arc0;
        for (size_t i = 0; i < n; ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % n];
            double ea0 = rb.vertex_arc[i];
            double ea1 = ea0 + dist(a, b);
            // Skip edges entirely outside the window (cyclic).
            double mid_arc = 0.5 * (ea0 + ea1);
            if (rb.cyclic_arc_distance(mid_arc, arc0) > window + 0.5 * (ea1 - ea0)) continue;
            Vec2 f = nearest_point_on_segment(x, a, b);
            double d = dist(x, f);
            if (d < best_d) {
                best_d = d;
                best_foot = f;
                best_arc = ea0 + dist(a, f);
            }
        }
        return std::tuple<Vec2, double, double>{best_foot, best_d, best_arc};
    };

    for (size_t c = 0; c < chains.size(); ++c) {
        Stratum st;
        std::vector<Vec2> pathpts;
        std::vector<std::pair<int, int>> pathsites;  // per path segment
        auto [ext_front, vtx_front] = corner_ext[c * 2 + 0];
        auto [ext_back, vtx_back] = corner_ext[c * 2 + 1];

        if (ext_front) {
            pathpts.push_back(poly[vtx_front]);
            pathsites.emplace_back(chain_sites[c].front());
        }
        for (size_t k = 0; k < chains[c].size(); ++k) pathpts.push_back(g.nodes[chains[c][k]].p);
        for (auto& sp : chain_sites[c]) pathsites.push_back(sp);
        if (ext_back) {
            pathpts.push_back(poly[vtx_back]);
            pathsites.push_back(chain_sites[c].back());
        }

        // Subdivide long pieces so the sampling matches the boundary resolution.
        std::vector<Vec2> xs;
        std::vector<std::pair<int, int>> hints;  // per sample
        for (size_t k = 0; k + 1 < pathpts.size(); ++k) {
            const Vec2& a = pathpts[k];
            const Vec2& b = pathpts[k + 1];
            int pieces = std::max(1, (int)std::ceil(dist(a, b) / (1.5 * rb.step)));
            for (int t = 0; t < pieces; ++t) {
                xs.push_back(a + (b - a) * ((double)t / pieces));
                hints.push_back(pathsites[k]);
            }
        }
        xs.push_back(pathpts.back());
        hints.push_back(pathsites.back());

        st.samples.resize(xs.size());
        double arc = 0.0;
        for (size_t k = 0; k < xs.size(); ++k) {
            SkeletalSample& s = st.samples[k];
            s.x = xs[k];
            if (k > 0) arc += dist(xs[k - 1], xs[k]);
            s.arc = arc;

            Vec2 tangent;
            if (xs.size() == 1)
                tangent = Vec2{1, 0};
            else if (k == 0)
                tangent = xs[1] - xs[0];
            else if (k + 1 == xs.size())
                tangent = xs[k] - xs[k - 1];
            else
                tangent = xs[k + 1] - xs[k - 1];
            tangent = normalized(tangent);

            auto fill_side = [&](int site_hint) {
                SideRecord rec;
                auto [foot, r, farc] = side_foot(s.x, site_hint);
                rec.valid = true;
                rec.foot = foot;
                rec.r = r;
                rec.foot_arc = farc;
                rec.u = r > 1e-13 ? normalized(foot - s.x) : rb.outward_normal_at_arc(farc);
                rec.rho = medial_density(rec.u, tangent);
                bool at_corner = false;
                double kstd = rb.curvature_at_arc(farc, at_corner);
                rec.foot_at_corner = at_corner;
                int pv = rb.pts[rb.nearest_point_index(farc)].polygon_vertex;
                bool reflex_foot = at_corner && pv >= 0 &&
                                   rb.pts[rb.nearest_point_index(farc)].reflex;
                if (reflex_foot && rec.r > 1e-12) {
                    // Point feature: the radial lines converge exactly at the foot.
                    rec.kappa_r = 1.0 / rec.r;
                } else {
                    double kb = -kstd;  // radial convention
                    double denom = 1.0 + rec.r * kb;
                    rec.kappa_r = (std::abs(denom) < 1e-9) ? -2.0 / std::max(rec.r, 1e-12)
                                                           : kb / denom;
                }
                // Keep the degenerate osculating tail bounded (it belongs to the
                // endpoint fan, which carries the area there).
                if (rec.r > 1e-12)
                    rec.kappa_r = std::clamp(rec.kappa_r, -2.0 / rec.r, 1.0 / rec.r);
                rec.blum_deviation = rec.r > 1e-13 ? check_partial_blum(rb, rec.u, farc) : 0.0;
                return rec;
            };

            SideRecord rec_a = fill_side(hints[k].first);
            SideRecord rec_b = fill_side(hints[k].second);
            // Side 0 carries the foot on the left of the walk direction.
            if (cross(tangent, rec_a.u) >= 0.0) {
                s.side[0] = rec_a;
                s.side[1] = rec_b;
            } else {
                s.side[0] = rec_b;
                s.side[1] = rec_a;
            }
            sk.max_blum_deviation = std::max({sk.max_blum_deviation,
                                              s.side[0].blum_deviation,
                                              s.side[1].blum_deviation});
        }
        st.length = arc;
        st.corner_end[0] = ext_front;
        st.corner_end[1] = ext_back;
        st.corner_vertex[0] = vtx_front;
        st.corner_vertex[1] = vtx_back;
        sk.strata.push_back(std::move(st));
    }

    // Fans: cap fans at non-corner leaves, corner fans at corner-extended ends.
    std::set<std::pair<int64_t, int64_t>> fan_dedup;
    auto add_fan = [&](const Fan& f) {
        auto key = std::make_pair((int64_t)std::llround(f.center.x / quant),
                                  (int64_t)std::llround(f.center.y / quant));
        if (!fan_dedup.insert(key).second) return;
        sk.fans.push_back(f);
    };
    auto ccw_span = [](double a0, double a1) {
        double d = a1 - a0;
        while (d < 0.0) d += 2.0 * M_PI;
        while (d >= 2.0 * M_PI) d -= 2.0 * M_PI;
        return d;
    };
    for (Stratum& st : sk.strata) {
        for (int end = 0; end < 2; ++end) {
            const SkeletalSample& s = end == 0 ? st.samples.front() : st.samples.back();
            const SkeletalSample& s_in =
                end == 0 ? st.samples[std::min<size_t>(1, st.samples.size() - 1)]
                         : st.samples[st.samples.size() >= 2 ? st.samples.size() - 2 : 0];
            if (st.corner_end[end]) {
                int vi = st.corner_vertex[end];
                Vec2 din = normalized(poly[vi] - poly[(vi + n - 1) % n]);
                Vec2 dout = normalized(poly[(vi + 1) % n] - poly[vi]);
                Vec2 n0{din.y, -din.x};
                Vec2 n1{dout.y, -dout.x};
                double a0 = angle_of(n0);
                Fan f;
                f.center = poly[vi];
                f.r = 0.0;
                f.theta0 = a0;
                f.theta1 = a0 + ccw_span(a0, angle_of(n1));
                f.at_boundary_corner = true;
                f.vertex_index = vi;
                add_fan(f);
                continue;
            }
            // A genuine junction end carries no fan.
            bool is_leaf = true;
            for (const Stratum& other : sk.strata) {
                if (&other == &st) continue;
                for (int oe = 0; oe < 2; ++oe) {
                    const Vec2& op = oe == 0 ? other.samples.front().x : other.samples.back().x;
                    if (dist(op, s.x) < quant * 4.0) is_leaf = false;
                }
            }
            if (!is_leaf) continue;
            Vec2 t_in = normalized(s_in.x - s.x);
            double au = angle_of(s.side[0].u);
            double av = angle_of(s.side[1].u);
            double span_uv = ccw_span(au, av);
            double at = ccw_span(au, angle_of(t_in));
            Fan f;
            f.center = s.x;
            f.r = 0.5 * (s.side[0].r + s.side[1].r);
            if (at < span_uv) {
                // t_in lies inside the CCW arc u0 -> u1; take the other arc.
                f.theta0 = av;
                f.theta1 = av + (2.0 * M_PI - span_uv);
            } else {
                f.theta0 = au;
                f.theta1 = au + span_uv;
            }
            if (f.theta1 - f.theta0 > 1e-6) add_fan(f);
        }
    }

    return sk;
}

}  // namespace skelink
