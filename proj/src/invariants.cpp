#include "invariants.hpp"

#include <algorithm>

#include "util.hpp"

namespace skelink {

ClosenessTable closeness(const VolumeTable& volumes) {
    int n = volumes.object_count;
    ClosenessTable table;
    table.n = n;
    table.c_dir.assign(n, std::vector<double>(n, 0.0));
    table.c.assign(n, std::vector<double>(n, 0.0));
    table.c_add.assign(n, std::vector<double>(n, 0.0));

    for (int i = 0; i < n; ++i) {
        table.c_dir[i][i] = 1.0;
        table.c[i][i] = 1.0;
        table.c_add[i][i] = 1.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double vo = volumes.omega(i, LinkTarget::Object, j);
            double vr = volumes.total(i, LinkTarget::Object, j);
            table.c_dir[i][j] = vr > 0.0 ? vo / vr : 0.0;
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            table.c[i][j] = table.c_dir[i][j] * table.c_dir[j][i];
            double vo = volumes.omega(i, LinkTarget::Object, j) +
                        volumes.omega(j, LinkTarget::Object, i);
            double vr = volumes.total(i, LinkTarget::Object, j) +
                        volumes.total(j, LinkTarget::Object, i);
            table.c_add[i][j] = vr > 0.0 ? vo / vr : 0.0;
        }
    return table;
}

SignificanceVector significance(const VolumeTable& volumes) {
    int n = volumes.object_count;
    SignificanceVector sig;
    sig.s.assign(n, 0.0);
    sig.s_abs.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            num += volumes.omega(i, LinkTarget::Object, j);
            den += volumes.total(i, LinkTarget::Object, j);
        }
        sig.s[i] = den > 0.0 ? num / den : 0.0;
        sig.s_abs[i] = sig.s[i] * volumes.object_volume[i];
    }
    return sig;
}

ThresholdCurves threshold_family(const Configuration& config, const std::vector<double>& taus,
                                 const ThresholdFamilyParams& params) {
    for (size_t k = 0; k < taus.size(); ++k) {
        if (taus[k] <= 0.0) throw InputError("threshold values must be > 0");
        if (k > 0 && taus[k] <= taus[k - 1]) throw InputError("threshold values must increase");
    }

    SkeletonParams sp;
    sp.samples_per_boundary = params.samples_per_boundary;
    sp.theta_min = params.theta_min;
    std::vector<SkeletalStructure> skeletons;
    for (size_t oi = 0; oi < config.size(); ++oi) {
        skeletons.push_back(compute_skeleton(config.objects[oi], sp));
        skeletons.back().object_index = (int)oi;
    }

    // One axis clipped for the largest threshold serves all of them; only the
    // per-ray cap changes.
    BoundingSpec max_spec;
    max_spec.kind = BoundingKind::Threshold;
    max_spec.tau = taus.empty() ? 1.0 : taus.back();
    BoundingRegion max_region = build_bounding_region(config, max_spec);
    LinkingParams lp;
    lp.fan_step = params.fan_step;
    lp.theta_min = params.theta_min;
    LinkingAxis axis = compute_linking_axis(config, skeletons, max_region, lp);

    ThresholdCurves curves;
    for (double tau : taus) {
        BoundingSpec spec;
        spec.kind = BoundingKind::Threshold;
        spec.tau = tau;
        BoundingRegion region = build_bounding_region(config, spec);
        LinkingAssignment assignment =
            compute_linking_assignment(config, skeletons, axis, region, lp);
        VolumeTable volumes = region_volumes(skeletons, assignment);
        curves.taus.push_back(tau);
        curves.closeness.push_back(closeness(volumes));
        curves.significance.push_back(significance(volumes));
        curves.volumes.push_back(std::move(volumes));
    }
    return curves;
}

}  // namespace skelink
