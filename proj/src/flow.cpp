#include "flow.hpp"

#include <cmath>

#include "linking.hpp"
#include "util.hpp"

namespace skelink {

double chi(double r, double ell, double t) {
    if (t < 0.0 || t > 1.0) throw InputError("flow time must lie in [0, 1]");
    if (t <= 0.5) return 2.0 * t * r;
    return 2.0 * (1.0 - t) * r + (2.0 * t - 1.0) * ell;
}

Vec2 linking_flow_point(const Vec2& x, const Vec2& u, double r, double ell, double t) {
    return x + u * chi(r, ell, t);
}

double evolve_curvature(double kappa_r, double chi_value) {
    double denom = 1.0 - chi_value * kappa_r;
    if (std::abs(denom) < 1e-14)
        throw HypothesisError("focal point reached: chi * kappa_r = 1");
    return kappa_r / denom;
}

double linking_axis_curvature(double kappa_r, double ell) {
    double denom = 1.0 - ell * kappa_r;
    if (std::abs(denom) < 1e-14)
        throw HypothesisError("focal point reached: ell * kappa_r = 1");
    return -kappa_r / denom;
}

NonsingularityReport check_nonsingularity(const std::vector<SkeletalStructure>& skeletons,
                                          const LinkingAssignment& assignment) {
    NonsingularityReport rep;
    for (size_t oi = 0; oi < skeletons.size(); ++oi) {
        const SkeletalStructure& sk = skeletons[oi];
        const ObjectLinks& links = assignment.objects[oi];
        for (size_t si = 0; si < sk.strata.size(); ++si) {
            const Stratum& st = sk.strata[si];
            for (size_t k = 0; k < st.samples.size(); ++k) {
                for (int side = 0; side < 2; ++side) {
                    const SideRecord& rec = st.samples[k].side[side];
                    if (!rec.valid) continue;
                    const SideLink& link = links.strata[si].sides[k][side];
                    ++rep.checked;
                    SideCondition cond;
                    cond.object = (int)oi;
                    cond.stratum = (int)si;
                    cond.sample = (int)k;
                    cond.side = side;
                    cond.kappa = rec.kappa_r;
                    cond.ell = link.ell;
                    if (rec.kappa_r > 0.0) {
                        cond.margin = 1.0 / rec.kappa_r - link.ell;
                        cond.pass = link.ell < 1.0 / rec.kappa_r;
                    } else {
                        cond.margin = std::numeric_limits<double>::max();
                        cond.pass = true;
                    }
                    rep.worst_margin = std::min(rep.worst_margin, cond.margin);
                    if (!cond.pass) rep.failures.push_back(cond);
                }
            }
        }
    }
    return rep;
}

LevelSet level_set(const std::vector<SkeletalStructure>& skeletons,
                   const LinkingAssignment& assignment, double t, double fan_step) {
    LevelSet ls;
    ls.t = t;
    for (size_t oi = 0; oi < skeletons.size(); ++oi) {
        const SkeletalStructure& sk = skeletons[oi];
        const ObjectLinks& links = assignment.objects[oi];
        for (size_t si = 0; si < sk.strata.size(); ++si) {
            const Stratum& st = sk.strata[si];
            for (int side = 0; side < 2; ++side) {
                LevelSetCurve curve;
                curve.object = (int)oi;
                curve.points.reserve(st.samples.size());
                for (size_t k = 0; k < st.samples.size(); ++k) {
                    const SideRecord& rec = st.samples[k].side[side];
                    const SideLink& link = links.strata[si].sides[k][side];
                    curve.points.push_back(
                        linking_flow_point(st.samples[k].x, rec.u, rec.r, link.ell, t));
                }
                // Fold-over: the flowed segment reverses against the base
                // segment in the frame of the mid-sample ray direction.
                for (size_t k = 0; k + 1 < st.samples.size(); ++k) {
                    Vec2 base = st.samples[k + 1].x - st.samples[k].x;
                    Vec2 flowed = curve.points[k + 1] - curve.points[k];
                    Vec2 u_mid = normalized(st.samples[k].side[side].u +
                                            st.samples[k + 1].side[side].u);
                    double j0 = cross(u_mid, base);
                    double j1 = cross(u_mid, flowed);
                    if (j0 * j1 < -1e-12) ++curve.fold_overs;
                }
                for (size_t k = 0; k + 1 < curve.points.size(); ++k)
                    ls.total_length += dist(curve.points[k], curve.points[k + 1]);
                ls.total_fold_overs += curve.fold_overs;
                ls.curves.push_back(std::move(curve));
            }
        }
        // Fan arcs at radius chi(t).
        for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
            const Fan& fan = sk.fans[fi];
            const FanLinks& fl = links.fans[fi];
            if (fl.dirs.empty()) continue;
            LevelSetCurve curve;
            curve.object = (int)oi;
            curve.is_fan_arc = true;
            for (const FanDirLink& d : fl.dirs) {
                double c = chi(d.r, d.link.ell, t);
                curve.points.push_back(fan.center + d.dir * c);
            }
            for (size_t k = 0; k + 1 < curve.points.size(); ++k)
                ls.total_length += dist(curve.points[k], curve.points[k + 1]);
            ls.curves.push_back(std::move(curve));
        }
    }
    (void)fan_step;
    return ls;
}

}  // namespace skelink
