#include "integrate.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace skelink {

double integrand_poly(double s, double kappa) {
    if (s <= 0.0) return 0.0;
    if (kappa <= 0.0 || s * kappa <= 1.0) return s - 0.5 * kappa * s * s;
    // Folded tail past the focal point 1/kappa.
    return 0.5 * kappa * s * s - s + 1.0 / kappa;
}

double integrand_poly_between(double a, double b, double kappa) {
    return integrand_poly(b, kappa) - integrand_poly(a, kappa);
}

namespace {

// Vertex weight of the composite trapezoid rule: half the incident segment lengths.
double vertex_weight(const Stratum& st, size_t k) {
    double w = 0.0;
    if (k > 0) w += 0.5 * dist(st.samples[k - 1].x, st.samples[k].x);
    if (k + 1 < st.samples.size()) w += 0.5 * dist(st.samples[k].x, st.samples[k + 1].x);
    return w;
}

struct GaussRule {
    std::vector<double> nodes;    // on [0,1]
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre nodes on [0,1] by Newton iteration on the Legendre polynomial.
GaussRule gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

RegionKey label_of(int object, const SideLink& link) {
    RegionKey key;
    key.object = object;
    key.kind = link.kind;
    key.target = link.kind == LinkTarget::Infinity ? -1 : link.target;
    return key;
}

}  // namespace

double skeletal_integral(const SkeletalStructure& sk,
                         const std::function<double(const SideView&)>& g) {
    double total = 0.0;
    for (size_t si = 0; si < sk.strata.size(); ++si) {
        const Stratum& st = sk.strata[si];
        for (size_t k = 0; k < st.samples.size(); ++k) {
            double w = vertex_weight(st, k);
            for (int side = 0; side < 2; ++side) {
                const SideRecord& rec = st.samples[k].side[side];
                if (!rec.valid) continue;
                SideView view{sk.object_index, (int)si, (int)k, side, &st.samples[k], &rec};
                total += g(view) * rec.rho * w;
            }
        }
    }
    return total;
}

double total_medial_measure(const SkeletalStructure& sk) {
    return skeletal_integral(sk, [](const SideView&) { return 1.0; });
}

double boundary_integral(const SkeletalStructure& sk,
                         const std::function<double(const Vec2&, const SideView&)>& g,
                         double blum_threshold) {
    double total = 0.0;
    for (size_t si = 0; si < sk.strata.size(); ++si) {
        const Stratum& st = sk.strata[si];
        for (size_t k = 0; k < st.samples.size(); ++k) {
            double w = vertex_weight(st, k);
            for (int side = 0; side < 2; ++side) {
                const SideRecord& rec = st.samples[k].side[side];
                if (!rec.valid || rec.foot_at_corner) continue;
                SideView view{sk.object_index, (int)si, (int)k, side, &st.samples[k], &rec};
                double gv = g(rec.foot, view);
                if (gv == 0.0) continue;
                if (rec.blum_deviation > blum_threshold)
                    throw HypothesisError(
                        "partial Blum condition violated on the integration domain "
                        "(deviation " + std::to_string(rec.blum_deviation) + " rad)");
                total += gv * std::abs(1.0 - rec.r * rec.kappa_r) * rec.rho * w;
            }
        }
    }
    for (const Fan& fan : sk.fans) {
        if (fan.r <= 0.0) continue;
        int ndir = std::max(1, (int)std::ceil((fan.theta1 - fan.theta0) / (M_PI / 256.0)));
        double dth = (fan.theta1 - fan.theta0) / ndir;
        for (int k = 0; k < ndir; ++k) {
            double theta = fan.theta0 + dth * (k + 0.5);
            Vec2 p = fan.center + dir_of(theta) * fan.r;
            SideView view{sk.object_index, -1, -1, -1, nullptr, nullptr};
            total += g(p, view) * fan.r * dth;
        }
    }
    return total;
}

const VolumeRow* VolumeTable::find(int object, LinkTarget kind, int target) const {
    for (const VolumeRow& row : rows)
        if (row.object == object && row.kind == kind &&
            (kind == LinkTarget::Infinity || row.target == target))
            return &row;
    return nullptr;
}

double VolumeTable::omega(int object, LinkTarget kind, int target) const {
    const VolumeRow* row = find(object, kind, target);
    return row ? row->vol_omega : 0.0;
}

double VolumeTable::external(int object, LinkTarget kind, int target) const {
    const VolumeRow* row = find(object, kind, target);
    return row ? row->vol_n : 0.0;
}

double VolumeTable::total(int object, LinkTarget kind, int target) const {
    const VolumeRow* row = find(object, kind, target);
    return row ? row->vol_r : 0.0;
}

VolumeTable region_volumes(const std::vector<SkeletalStructure>& skeletons,
                           const LinkingAssignment& assignment) {
    VolumeTable table;
    table.object_count = (int)skeletons.size();
    table.object_volume.assign(skeletons.size(), 0.0);
    table.object_shoelace.assign(skeletons.size(), 0.0);
    table.object_steiner.assign(skeletons.size(), 0.0);

    std::map<RegionKey, VolumeRow> acc;
    auto row_for = [&](const RegionKey& key) -> VolumeRow& {
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

    for (size_t oi = 0; oi < skeletons.size(); ++oi) {
        const SkeletalStructure& sk = skeletons[oi];
        const ObjectLinks& links = assignment.objects[oi];
        table.object_shoelace[oi] = sk.shoelace_area;

        for (size_t si = 0; si < sk.strata.size(); ++si) {
            const Stratum& st = sk.strata[si];
            for (size_t k = 0; k < st.samples.size(); ++k) {
                double w = vertex_weight(st, k);
                for (int side = 0; side < 2; ++side) {
                    const SideRecord& rec = st.samples[k].side[side];
                    if (!rec.valid) continue;
                    const SideLink& link = links.strata[si].sides[k][side];
                    double vo = integrand_poly(rec.r, rec.kappa_r) * rec.rho * w;
                    double vn =
                        integrand_poly_between(rec.r, link.ell, rec.kappa_r) * rec.rho * w;
                    VolumeRow& row = row_for(label_of((int)oi, link));
                    row.vol_omega += vo;
                    row.vol_n += vn;
                    table.object_volume[oi] += vo;
                    table.object_steiner[oi] += vn;
                }
            }
        }
        for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
            const Fan& fan = sk.fans[fi];
            const FanLinks& fl = links.fans[fi];
            if (fl.dirs.empty()) continue;
            double dth = (fan.theta1 - fan.theta0) / fl.dirs.size();
            for (const FanDirLink& d : fl.dirs) {
                double vo = 0.5 * fan.r * fan.r * dth;
                double vn = 0.5 * (d.link.ell * d.link.ell - fan.r * fan.r) * dth;
                VolumeRow& row = row_for(label_of((int)oi, d.link));
                row.vol_omega += vo;
                row.vol_n += vn;
                table.object_volume[oi] += vo;
                table.object_steiner[oi] += vn;
            }
        }
    }

    for (auto& [key, row] : acc) {
        row.vol_r = row.vol_omega + row.vol_n;
        table.rows.push_back(row);
    }
    return table;
}

double weyl_volume(const SkeletalStructure& sk) {
    double total = skeletal_integral(
        sk, [](const SideView& v) { return integrand_poly(v.rec->r, v.rec->kappa_r); });
    for (const Fan& fan : sk.fans)
        total += 0.5 * fan.r * fan.r * (fan.theta1 - fan.theta0);
    return total;
}

double steiner_volume(const SkeletalStructure& sk, const ObjectLinks& links) {
    double total = 0.0;
    for (size_t si = 0; si < sk.strata.size(); ++si) {
        const Stratum& st = sk.strata[si];
        for (size_t k = 0; k < st.samples.size(); ++k) {
            double w = vertex_weight(st, k);
            for (int side = 0; side < 2; ++side) {
                const SideRecord& rec = st.samples[k].side[side];
                if (!rec.valid) continue;
                const SideLink& link = links.strata[si].sides[k][side];
                total += integrand_poly_between(rec.r, link.ell, rec.kappa_r) * rec.rho * w;
            }
        }
    }
    for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
        const Fan& fan = sk.fans[fi];
        const FanLinks& fl = links.fans[fi];
        if (fl.dirs.empty()) continue;
        double dth = (fan.theta1 - fan.theta0) / fl.dirs.size();
        for (const FanDirLink& d : fl.dirs)
            total += 0.5 * (d.link.ell * d.link.ell - fan.r * fan.r) * dth;
    }
    return total;
}

RegionIntegral region_integral(const std::vector<SkeletalStructure>& skeletons,
                               const LinkingAssignment& assignment,
                               const std::function<double(const Vec2&)>& g, int nodes) {
    GaussRule rule = gauss_rule(std::max(2, nodes));
    RegionIntegral out;

    auto ray_part = [&](const Vec2& x, const Vec2& u, double a, double b, double kappa) {
        if (b <= a) return 0.0;
        double len = b - a;
        double acc = 0.0;
        for (size_t q = 0; q < rule.nodes.size(); ++q) {
            double t = a + len * rule.nodes[q];
            acc += g(x + u * t) * std::abs(1.0 - t * kappa) * rule.weights[q];
        }
        return acc * len;
    };

    for (size_t oi = 0; oi < skeletons.size(); ++oi) {
        const SkeletalStructure& sk = skeletons[oi];
        const ObjectLinks& links = assignment.objects[oi];
        for (size_t si = 0; si < sk.strata.size(); ++si) {
            const Stratum& st = sk.strata[si];
            for (size_t k = 0; k < st.samples.size(); ++k) {
                double w = vertex_weight(st, k);
                for (int side = 0; side < 2; ++side) {
                    const SideRecord& rec = st.samples[k].side[side];
                    if (!rec.valid) continue;
                    const SideLink& link = links.strata[si].sides[k][side];
                    double gi = ray_part(st.samples[k].x, rec.u, 0.0, rec.r, rec.kappa_r);
                    double ge = ray_part(st.samples[k].x, rec.u, rec.r, link.ell, rec.kappa_r);
                    out.interior += gi * rec.rho * w;
                    out.exterior += ge * rec.rho * w;
                    out.per_label[label_of((int)oi, link)] += (gi + ge) * rec.rho * w;
                }
            }
        }
        for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
            const Fan& fan = sk.fans[fi];
            const FanLinks& fl = links.fans[fi];
            if (fl.dirs.empty()) continue;
            double dth = (fan.theta1 - fan.theta0) / fl.dirs.size();
            for (const FanDirLink& d : fl.dirs) {
                double gi = 0.0, ge = 0.0;
                for (size_t q = 0; q < rule.nodes.size(); ++q) {
                    double ti = fan.r * rule.nodes[q];
                    gi += g(fan.center + d.dir * ti) * ti * rule.weights[q];
                }
                gi *= fan.r;
                double len = d.link.ell - fan.r;
                if (len > 0.0) {
                    for (size_t q = 0; q < rule.nodes.size(); ++q) {
                        double te = fan.r + len * rule.nodes[q];
                        ge += g(fan.center + d.dir * te) * te * rule.weights[q];
                    }
                    ge *= len;
                }
                out.interior += gi * dth;
                out.exterior += ge * dth;
                out.per_label[label_of((int)oi, d.link)] += (gi + ge) * dth;
            }
        }
    }
    out.total = out.interior + out.exterior;
    return out;
}

RegionIntegral region_integral_indicator(const std::vector<SkeletalStructure>& skeletons,
                                         const LinkingAssignment& assignment, const Polygon& q) {
    RegionIntegral out;
    Box qbox = polygon_bbox(q);
    qbox.dilate(1e-9 * qbox.diameter());

    auto clipped_weight = [&](const Vec2& x, const Vec2& u, double t0, double t1, double kappa,
                              bool polar) {
        double acc = 0.0;
        for (auto& [a, b] : ray_polygon_inside_intervals(x, u, q, t0, t1)) {
            if (polar)
                acc += 0.5 * (b * b - a * a);
            else
                acc += integrand_poly_between(a, b, kappa);
        }
        return acc;
    };

    for (size_t oi = 0; oi < skeletons.size(); ++oi) {
        const SkeletalStructure& sk = skeletons[oi];
        const ObjectLinks& links = assignment.objects[oi];
        for (size_t si = 0; si < sk.strata.size(); ++si) {
            const Stratum& st = sk.strata[si];
            for (size_t k = 0; k < st.samples.size(); ++k) {
                double w = vertex_weight(st, k);
                for (int side = 0; side < 2; ++side) {
                    const SideRecord& rec = st.samples[k].side[side];
                    if (!rec.valid) continue;
                    const SideLink& link = links.strata[si].sides[k][side];
                    double gi = clipped_weight(st.samples[k].x, rec.u, 0.0, rec.r, rec.kappa_r, false);
                    double ge =
                        clipped_weight(st.samples[k].x, rec.u, rec.r, link.ell, rec.kappa_r, false);
                    out.interior += gi * rec.rho * w;
                    out.exterior += ge * rec.rho * w;
                    out.per_label[label_of((int)oi, link)] += (gi + ge) * rec.rho * w;
                }
            }
        }
        for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
            const Fan& fan = sk.fans[fi];
            const FanLinks& fl = links.fans[fi];
            if (fl.dirs.empty()) continue;
            double dth = (fan.theta1 - fan.theta0) / fl.dirs.size();
            for (const FanDirLink& d : fl.dirs) {
                double gi = clipped_weight(fan.center, d.dir, 0.0, fan.r, 0.0, true);
                double ge = clipped_weight(fan.center, d.dir, fan.r, d.link.ell, 0.0, true);
                out.interior += gi * dth;
                out.exterior += ge * dth;
                out.per_label[label_of((int)oi, d.link)] += (gi + ge) * dth;
            }
        }
    }
    out.total = out.interior + out.exterior;
    return out;
}

double crofton_volume(const std::vector<SkeletalStructure>& skeletons,
                      const LinkingAssignment& assignment, const Polygon& q) {
    return region_integral_indicator(skeletons, assignment, q).total;
}

}  // namespace skelink
