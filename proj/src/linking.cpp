#include "linking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "util.hpp"
#include "voronoi_util.hpp"

namespace skelink {

bool LinkingAxis::has_pair_stratum(int i, int j) const {
    for (const AxisStratum& st : strata) {
        if (st.self_link) continue;
        if ((st.obj_a == i && st.obj_b == j) || (st.obj_a == j && st.obj_b == i)) return true;
    }
    return false;
}

bool StrataPartition::pair_linked(int i, int j) const {
    for (const SideRun& run : side_runs)
        if (run.object == i && run.kind == LinkTarget::Object && run.target == j) return true;
    for (const FanRun& run : fan_runs)
        if (run.object == i && run.kind == LinkTarget::Object && run.target == j) return true;
    return false;
}

namespace {

struct Site {
    Vec2 p;
    int object;
    double arc;
};

// Cyclic arc interval test: does any reflex-corner arc of the object lie
// strictly inside the shorter gap between the two site arcs?
bool reflex_in_gap(const std::vector<double>& reflex_arcs, double a1, double a2, double perimeter,
                   double eps) {
    if (reflex_arcs.empty()) return false;
    double fwd = std::fmod(a2 - a1 + perimeter, perimeter);
    double start = a1, len = fwd;
    if (fwd > 0.5 * perimeter) {
        start = a2;
        len = perimeter - fwd;
    }
    for (double ra : reflex_arcs) {
        double off = std::fmod(ra - start + perimeter, perimeter);
        if (off > eps && off < len - eps) return true;
    }
    return false;
}

struct NodeKey {
    int64_t qx, qy;
    bool operator<(const NodeKey& o) const { return qx < o.qx || (qx == o.qx && qy < o.qy); }
};

}  // namespace

LinkingAxis compute_linking_axis(const Configuration& config,
                                 const std::vector<SkeletalStructure>& skeletons,
                                 const BoundingRegion& bounding, const LinkingParams& params) {
    size_t nobj = config.size();
    double diam = bounding.working_box.diameter();

    // Objects must keep an exterior collar inside the bounding region
    // (touching is tolerated for margin-0 hulls).
    if (bounding.has_boundary()) {
        for (size_t oi = 0; oi < nobj; ++oi)
            for (const Vec2& p : config.objects[oi].vertices) {
                if (point_in_polygon(p, bounding.boundary)) continue;
                double d = 0.0;
                size_t nb = bounding.boundary.size();
                double best = std::numeric_limits<double>::max();
                for (size_t k = 0; k < nb; ++k)
                    best = std::min(best, dist_point_segment(p, bounding.boundary[k],
                                                             bounding.boundary[(k + 1) % nb]));
                d = best;
                if (d > 1e-9 * diam)
                    throw InputError("bounding region does not contain object " +
                                     std::to_string(oi + 1));
            }
    }

    std::vector<Site> sites;
    std::vector<double> step(nobj);
    std::vector<std::vector<double>> reflex_arcs(nobj);
    for (size_t oi = 0; oi < nobj; ++oi) {
        const ResampledBoundary& rb = skeletons[oi].boundary;
        step[oi] = rb.step;
        for (const BoundaryPoint& bp : rb.pts) {
            sites.push_back({bp.p, (int)oi, bp.arc});
            if (bp.corner && bp.reflex) reflex_arcs[oi].push_back(bp.arc);
        }
    }
    std::vector<Vec2> site_pts(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) site_pts[i] = sites[i].p;

    std::vector<VoronoiEdge> ves = voronoi_edges(site_pts, bounding.working_box);

    // Label and prune raw edges, then clip against objects and the bounding region.
    struct KeptSeg {
        Vec2 a, b;
        int obj_a, obj_b;
        bool self;
        bool bound_cut_a = false, bound_cut_b = false;
    };
    std::vector<KeptSeg> kept;

    auto edge_survives = [&](const VoronoiEdge& ve, const Vec2& mid) {
        const Site& sa = sites[ve.site_a];
        const Site& sb = sites[ve.site_b];
        if (sa.object != sb.object) return true;
        const ResampledBoundary& rb = skeletons[sa.object].boundary;
        if (reflex_in_gap(reflex_arcs[sa.object], sa.arc, sb.arc, rb.perimeter,
                          0.25 * step[sa.object]))
            return true;
        double gap = rb.cyclic_arc_distance(sa.arc, sb.arc);
        if (gap <= 3.0 * step[sa.object]) return false;
        double subtense = angle_between(sa.p - mid, sb.p - mid);
        return subtense >= params.theta_min;
    };

    for (const VoronoiEdge& ve : ves) {
        Vec2 a = ve.a, b = ve.b;
        Vec2 d = b - a;
        double len = norm(d);
        if (len <= 0.0) continue;

        std::vector<double> cuts{0.0, 1.0};
        auto add_crossings = [&](const Polygon& poly) {
            size_t n = poly.size();
            for (size_t i = 0; i < n; ++i) {
                auto t = ray_segment_intersection(a, d, poly[i], poly[(i + 1) % n]);
                if (t && *t > 0.0 && *t < 1.0) cuts.push_back(*t);
            }
        };
        for (size_t oi = 0; oi < nobj; ++oi) add_crossings(config.objects[oi].vertices);
        if (bounding.has_boundary()) add_crossings(bounding.boundary);
        std::sort(cuts.begin(), cuts.end());

        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            double t0 = cuts[k], t1 = cuts[k + 1];
            if (t1 - t0 < 1e-12) continue;
            Vec2 pa = a + d * t0;
            Vec2 pb = a + d * t1;
            Vec2 mid = (pa + pb) * 0.5;
            bool inside_object = false;
            for (size_t oi = 0; oi < nobj && !inside_object; ++oi)
                if (point_in_polygon(mid, config.objects[oi].vertices)) inside_object = true;
            if (inside_object) continue;
            if (bounding.has_boundary() && !point_in_polygon(mid, bounding.boundary)) continue;
            if (!edge_survives(ve, mid)) continue;
            KeptSeg ks;
            ks.a = pa;
            ks.b = pb;
            ks.obj_a = sites[ve.site_a].object;
            ks.obj_b = sites[ve.site_b].object;
            ks.self = (ks.obj_a == ks.obj_b);
            ks.bound_cut_a = (t0 > 0.0) || (t0 == 0.0 && ve.clipped_a);
            ks.bound_cut_b = (t1 < 1.0) || (t1 == 1.0 && ve.clipped_b);
            kept.push_back(ks);
        }
    }

    // Graph over kept segments; chains become labeled strata.
    LinkingAxis axis;
    double quant = std::max(diam * 1e-12, 1e-12);
    std::map<NodeKey, int> node_index;
    struct Node {
        Vec2 p;
        std::vector<int> edges;
    };
    std::vector<Node> nodes;
    auto node_of = [&](const Vec2& p) {
        NodeKey k{(int64_t)std::llround(p.x / quant), (int64_t)std::llround(p.y / quant)};
        auto it = node_index.find(k);
        if (it != node_index.end()) return it->second;
        int id = (int)nodes.size();
        nodes.push_back({p, {}});
        node_index.emplace(k, id);
        return id;
    };
    struct GEdge {
        int n0, n1;
        int label_a, label_b;  // sorted object pair
        bool self;
        bool cut0, cut1;
        bool used = false;
    };
    std::vector<GEdge> gedges;
    for (const KeptSeg& ks : kept) {
        GEdge e;
        e.n0 = node_of(ks.a);
        e.n1 = node_of(ks.b);
        if (e.n0 == e.n1) continue;
        e.label_a = std::min(ks.obj_a, ks.obj_b);
        e.label_b = std::max(ks.obj_a, ks.obj_b);
        e.self = ks.self;
        e.cut0 = ks.bound_cut_a;
        e.cut1 = ks.bound_cut_b;
        int id = (int)gedges.size();
        gedges.push_back(e);
        nodes[e.n0].edges.push_back(id);
        nodes[e.n1].edges.push_back(id);
    }

    auto degree = [&](int ni) { return (int)nodes[ni].edges.size(); };
    for (size_t ni = 0; ni < nodes.size(); ++ni)
        if (degree((int)ni) >= 3) axis.branch_points.push_back(nodes[ni].p);

    auto same_label = [&](const GEdge& x, const GEdge& y) {
        return x.label_a == y.label_a && x.label_b == y.label_b && x.self == y.self;
    };
    auto walk = [&](int start_node, int first_edge) {
        AxisStratum st;
        const GEdge& fe = gedges[first_edge];
        st.obj_a = fe.label_a;
        st.obj_b = fe.label_b;
        st.self_link = fe.self;
        int node = start_node, e = first_edge;
        st.polyline.push_back(nodes[node].p);
        bool start_cut = (gedges[e].n0 == node) ? gedges[e].cut0 : gedges[e].cut1;
        st.bounding_end[0] = start_cut && degree(node) == 1;
        while (true) {
            GEdge& ge = gedges[e];
            ge.used = true;
            int nxt = (ge.n0 == node) ? ge.n1 : ge.n0;
            st.polyline.push_back(nodes[nxt].p);
            bool end_cut = (ge.n0 == node) ? ge.cut1 : ge.cut0;
            node = nxt;
            if (degree(node) != 2) {
                st.bounding_end[1] = end_cut && degree(node) == 1;
                break;
            }
            int next_edge = -1;
            for (int cand : nodes[node].edges)
                if (!gedges[cand].used && same_label(gedges[cand], ge)) { next_edge = cand; break; }
            if (next_edge < 0) {
                st.bounding_end[1] = end_cut && degree(node) == 1;
                break;
            }
            e = next_edge;
        }
        axis.strata.push_back(std::move(st));
    };
    for (size_t ni = 0; ni < nodes.size(); ++ni) {
        if (degree((int)ni) == 2) continue;
        for (int e : nodes[ni].edges)
            if (!gedges[e].used) walk((int)ni, e);
    }
    for (size_t e = 0; e < gedges.size(); ++e)
        if (!gedges[e].used) walk(gedges[e].n0, (int)e);  // label-change joints and cycles

    for (size_t si = 0; si < axis.strata.size(); ++si) {
        const Polyline& pl = axis.strata[si].polyline;
        for (size_t k = 0; k + 1 < pl.size(); ++k)
            axis.segments.push_back({pl[k], pl[k + 1], (int)si});
    }
    return axis;
}

namespace {

class RayMarcher {
public:
    RayMarcher(const Configuration& config, const std::vector<SkeletalStructure>& skeletons,
               const LinkingAxis& axis, const BoundingRegion& bounding)
        : config_(config), skeletons_(skeletons), axis_(axis), bounding_(bounding) {
        for (size_t oi = 0; oi < config.size(); ++oi) {
            const Polygon& poly = config.objects[oi].vertices;
            for (size_t k = 0; k < poly.size(); ++k)
                grid_.add(poly[k], poly[(k + 1) % poly.size()], (int)oi);
        }
        grid_.build();
        diam_ = bounding.working_box.diameter();
    }

    SideLink march(const Vec2& origin, const Vec2& u, double r, int self_object) const {
        double eps = 1e-12 * diam_;
        double step = skeletons_[self_object].boundary.step;

        // First hit on the discretized axis.
        double t_axis = std::numeric_limits<double>::max();
        double lo_accept = std::max(r - 2.0 * step, 0.0) - eps;
        for (const LinkingAxis::Seg& s : axis_.segments) {
            auto t = ray_segment_intersection(origin, u, s.a, s.b);
            if (t && *t > lo_accept && *t < t_axis) t_axis = *t;
        }
        // Tie resolution: lowest target among hits within tolerance of the first.
        int axis_stratum = -1;
        if (t_axis < std::numeric_limits<double>::max()) {
            double tol = std::max(1e-9 * t_axis, eps);
            int best_rank = std::numeric_limits<int>::max();
            for (const LinkingAxis::Seg& s : axis_.segments) {
                auto t = ray_segment_intersection(origin, u, s.a, s.b);
                if (!t || *t > t_axis + tol || *t <= lo_accept) continue;
                const AxisStratum& st = axis_.strata[s.stratum];
                int rank;
                if (st.self_link)
                    rank = (st.obj_a == self_object) ? st.obj_a : 1000 + std::min(st.obj_a, st.obj_b);
                else if (st.obj_a == self_object || st.obj_b == self_object)
                    rank = (st.obj_a == self_object) ? st.obj_b : st.obj_a;
                else
                    rank = 1000 + std::min(st.obj_a, st.obj_b);
                if (rank < best_rank) {
                    best_rank = rank;
                    axis_stratum = s.stratum;
                }
            }
        }

        // Bounding cap.
        double t_bound;
        if (bounding_.kind == BoundingKind::Threshold) {
            t_bound = r + bounding_.tau;
        } else {
            t_bound = std::numeric_limits<double>::max();
            const Polygon& bp = bounding_.boundary;
            for (size_t k = 0; k < bp.size(); ++k) {
                auto t = ray_segment_intersection(origin, u, bp[k], bp[(k + 1) % bp.size()]);
                if (t && *t > eps && *t < t_bound) t_bound = *t;
            }
            if (t_bound == std::numeric_limits<double>::max()) t_bound = r;  // degenerate
        }

        // First object-boundary hit past the own foot; a hit before the axis
        // means the ray slipped past the discretized axis near a root.
        double t_obj = std::numeric_limits<double>::max();
        for (size_t oi = 0; oi < config_.size(); ++oi) {
            const Polygon& poly = config_.objects[oi].vertices;
            double guard = ((int)oi == self_object) ? r + std::max(2.0 * step, 1e-9 * diam_)
                                                    : std::max(r - 2.0 * step, eps);
            for (size_t k = 0; k < poly.size(); ++k) {
                auto t = ray_segment_intersection(origin, u, poly[k], poly[(k + 1) % poly.size()]);
                if (t && *t > guard && *t < t_obj) t_obj = *t;
            }
        }

        SideLink link;
        double m = std::min(t_axis, t_bound);
        if (t_obj < m * (1.0 - 1e-12) - eps) {
            link = bisect_equidistance(origin, u, r, std::min(t_obj, t_bound), self_object);
            if (bounding_.kind == BoundingKind::Threshold && link.ell > r + bounding_.tau + eps) {
                link.kind = LinkTarget::Infinity;
                link.target = -1;
                link.ell = r + bounding_.tau;
                link.capped = true;
            }
            link.terminal = origin + u * link.ell;
            return link;
        }
        if (t_axis <= t_bound * (1.0 + 1e-9) + eps) {
            const AxisStratum& st = axis_.strata[axis_stratum];
            link.ell = std::max(t_axis, r);
            if (st.self_link && st.obj_a == self_object) {
                link.kind = LinkTarget::SelfLink;
                link.target = self_object;
            } else if (st.obj_a == self_object || st.obj_b == self_object) {
                link.kind = LinkTarget::Object;
                link.target = (st.obj_a == self_object) ? st.obj_b : st.obj_a;
            } else {
                // Foreign stratum (discretization slack near junctions): use the
                // nearest competitor at the hit point.
                Vec2 hit = origin + u * link.ell;
                auto near = grid_.nearest(hit);
                int obj = near.segment >= 0 ? grid_.payload(near.segment) : std::min(st.obj_a, st.obj_b);
                if (obj == self_object) {
                    link.kind = LinkTarget::SelfLink;
                    link.target = self_object;
                } else {
                    link.kind = LinkTarget::Object;
                    link.target = obj;
                }
            }
        } else {
            link.kind = LinkTarget::Infinity;
            link.target = -1;
            link.ell = t_bound;
            link.capped = true;
        }
        link.terminal = origin + u * link.ell;
        return link;
    }

private:
    // First point along the ray that is strictly nearer to some boundary
    // feature than to the launch foot; 1-Lipschitz, so the predicate is
    // monotone and bisection is exact.
    SideLink bisect_equidistance(const Vec2& origin, const Vec2& u, double r, double t_hi,
                                 int self_object) const {
        double eps = 1e-12 * diam_;
        auto f = [&](double t) {
            Vec2 p = origin + u * t;
            return grid_.nearest(p).distance - (t - r);
        };
        double lo = r, hi = t_hi;
        double flo = f(lo);
        if (flo < -eps) hi = lo;  // already past (reflex-corner feet): ell = r
        double tol = 1e-10 * std::max(diam_, 1.0);
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            if (f(mid) < -eps)
                hi = mid;
            else
                lo = mid;
        }
        SideLink link;
        link.ell = std::max(hi, r);
        Vec2 probe = origin + u * (link.ell + 64.0 * tol);
        auto near = grid_.nearest(probe);
        int obj = near.segment >= 0 ? grid_.payload(near.segment) : -1;
        if (obj == self_object) {
            link.kind = LinkTarget::SelfLink;
            link.target = self_object;
        } else {
            link.kind = LinkTarget::Object;
            link.target = obj;
        }
        link.terminal = origin + u * link.ell;
        return link;
    }

    const Configuration& config_;
    const std::vector<SkeletalStructure>& skeletons_;
    const LinkingAxis& axis_;
    const BoundingRegion& bounding_;
    SegmentGrid grid_;
    double diam_ = 1.0;
};

}  // namespace

LinkingAssignment compute_linking_assignment(const Configuration& config,
                                             const std::vector<SkeletalStructure>& skeletons,
                                             const LinkingAxis& axis,
                                             const BoundingRegion& bounding,
                                             const LinkingParams& params) {
    RayMarcher marcher(config, skeletons, axis, bounding);
    LinkingAssignment assignment;
    assignment.fan_step = params.fan_step;
    assignment.objects.resize(skeletons.size());

    for (size_t oi = 0; oi < skeletons.size(); ++oi) {
        const SkeletalStructure& sk = skeletons[oi];
        ObjectLinks& links = assignment.objects[oi];
        links.strata.resize(sk.strata.size());

        std::vector<std::pair<int, int>> tasks;  // (stratum, sample)
        for (size_t si = 0; si < sk.strata.size(); ++si) {
            links.strata[si].sides.resize(sk.strata[si].samples.size());
            for (size_t k = 0; k < sk.strata[si].samples.size(); ++k)
                tasks.emplace_back((int)si, (int)k);
        }
        parallel_for(0, (int64_t)tasks.size(), [&](int64_t idx) {
            auto [si, k] = tasks[idx];
            const SkeletalSample& s = sk.strata[si].samples[k];
            for (int side = 0; side < 2; ++side) {
                const SideRecord& rec = s.side[side];
                if (!rec.valid) continue;
                links.strata[si].sides[k][side] = marcher.march(s.x, rec.u, rec.r, (int)oi);
            }
        });

        links.fans.resize(sk.fans.size());
        for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
            const Fan& fan = sk.fans[fi];
            double span = fan.theta1 - fan.theta0;
            int ndir = std::max(1, (int)std::ceil(span / params.fan_step));
            links.fans[fi].dirs.resize(ndir);
            parallel_for(0, ndir, [&](int64_t k) {
                double theta = fan.theta0 + span * ((double)k + 0.5) / ndir;
                FanDirLink d;
                d.theta = theta;
                d.dir = dir_of(theta);
                d.r = fan.r;
                d.link = marcher.march(fan.center, d.dir, fan.r, (int)oi);
                links.fans[fi].dirs[k] = d;
            });
        }
    }
    return assignment;
}

StrataPartition partition_strata(const std::vector<SkeletalStructure>& skeletons,
                                 const LinkingAssignment& assignment) {
    StrataPartition part;
    for (size_t oi = 0; oi < skeletons.size(); ++oi) {
        const SkeletalStructure& sk = skeletons[oi];
        const ObjectLinks& links = assignment.objects[oi];
        for (size_t si = 0; si < sk.strata.size(); ++si) {
            const auto& sides = links.strata[si].sides;
            for (int side = 0; side < 2; ++side) {
                int n = (int)sides.size();
                int k = 0;
                while (k < n) {
                    int j = k;
                    while (j < n && sides[j][side].kind == sides[k][side].kind &&
                           sides[j][side].target == sides[k][side].target)
                        ++j;
                    SideRun run;
                    run.object = (int)oi;
                    run.stratum = (int)si;
                    run.side = side;
                    run.begin = k;
                    run.end = j;
                    run.kind = sides[k][side].kind;
                    run.target = sides[k][side].target;
                    part.side_runs.push_back(run);
                    k = j;
                }
            }
        }
        for (size_t fi = 0; fi < links.fans.size(); ++fi) {
            const auto& dirs = links.fans[fi].dirs;
            int n = (int)dirs.size();
            int k = 0;
            while (k < n) {
                int j = k;
                while (j < n && dirs[j].link.kind == dirs[k].link.kind &&
                       dirs[j].link.target == dirs[k].link.target)
                    ++j;
                FanRun run;
                run.object = (int)oi;
                run.fan = (int)fi;
                run.begin = k;
                run.end = j;
                run.kind = dirs[k].link.kind;
                run.target = dirs[k].link.target;
                part.fan_runs.push_back(run);
                k = j;
            }
        }
    }
    return part;
}

LinkingRegions extract_regions(const std::vector<SkeletalStructure>& skeletons,
                               const LinkingAssignment& assignment,
                               const StrataPartition& partition) {
    LinkingRegions regions;
    auto key_of = [](int object, LinkTarget kind, int target) {
        RegionKey key;
        key.object = object;
        key.kind = kind;
        key.target = kind == LinkTarget::Infinity ? -1 : target;
        return key;
    };

    for (const SideRun& run : partition.side_runs) {
        if (run.end - run.begin < 2) continue;
        const Stratum& st = skeletons[run.object].strata[run.stratum];
        const auto& sides = assignment.objects[run.object].strata[run.stratum].sides;
        RegionKey key = key_of(run.object, run.kind, run.target);

        Polygon omega, external;
        Polyline feet;
        for (int k = run.begin; k < run.end; ++k) omega.push_back(st.samples[k].x);
        for (int k = run.end - 1; k >= run.begin; --k) omega.push_back(st.samples[k].side[run.side].foot);
        for (int k = run.begin; k < run.end; ++k) {
            feet.push_back(st.samples[k].side[run.side].foot);
            external.push_back(st.samples[k].side[run.side].foot);
        }
        for (int k = run.end - 1; k >= run.begin; --k) external.push_back(sides[k][run.side].terminal);

        if (polygon_area(omega) > 0.0) regions.internal_pieces[key].push_back(std::move(omega));
        if (polygon_area(external) > 0.0) regions.external_pieces[key].push_back(std::move(external));
        regions.boundary_pieces[key].push_back(std::move(feet));
    }

    for (const FanRun& run : partition.fan_runs) {
        if (run.end - run.begin < 1) continue;
        const Fan& fan = skeletons[run.object].fans[run.fan];
        const auto& dirs = assignment.objects[run.object].fans[run.fan].dirs;
        RegionKey key = key_of(run.object, run.kind, run.target);

        if (fan.r > 0.0) {
            Polygon omega;
            omega.push_back(fan.center);
            for (int k = run.begin; k < run.end; ++k)
                omega.push_back(fan.center + dirs[k].dir * fan.r);
            if (polygon_area(omega) > 0.0) regions.internal_pieces[key].push_back(std::move(omega));

            Polygon external;
            for (int k = run.begin; k < run.end; ++k)
                external.push_back(fan.center + dirs[k].dir * fan.r);
            for (int k = run.end - 1; k >= run.begin; --k) external.push_back(dirs[k].link.terminal);
            if (polygon_area(external) > 0.0)
                regions.external_pieces[key].push_back(std::move(external));

            Polyline arc;
            for (int k = run.begin; k < run.end; ++k)
                arc.push_back(fan.center + dirs[k].dir * fan.r);
            regions.boundary_pieces[key].push_back(std::move(arc));
        } else {
            Polygon external;
            external.push_back(fan.center);
            for (int k = run.begin; k < run.end; ++k) external.push_back(dirs[k].link.terminal);
            if (polygon_area(external) > 0.0)
                regions.external_pieces[key].push_back(std::move(external));
        }
    }
    return regions;
}

}  // namespace skelink
