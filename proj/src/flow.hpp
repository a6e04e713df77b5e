#pragma once

#include <vector>

#include "geom.hpp"
#include "skeleton.hpp"

namespace skelink {

struct LinkingAssignment;  // linking.hpp

// Two-phase flow displacement: radial at twice the speed up to the boundary,
// then interpolating out to the linking axis. chi(1/2) = r exactly on both branches.
double chi(double r, double ell, double t);

Vec2 linking_flow_point(const Vec2& x, const Vec2& u, double r, double ell, double t);

// kappa_t for the level set at displacement chi. Throws HypothesisError at the
// focal point chi * kappa_r = 1.
double evolve_curvature(double kappa_r, double chi_value);

// Radial curvature of the linking-axis side reached at displacement ell
// (the unit field flips sign across the axis).
double linking_axis_curvature(double kappa_r, double ell);

struct SideCondition {
    int object = -1;
    int stratum = -1;
    int sample = -1;
    int side = -1;
    double kappa = 0.0;
    double ell = 0.0;
    double margin = 0.0;  // 1/kappa - ell when kappa > 0, +inf otherwise
    bool pass = true;
};

struct NonsingularityReport {
    std::vector<SideCondition> failures;
    double worst_margin = std::numeric_limits<double>::max();
    int checked = 0;
    bool pass() const { return failures.empty(); }
};

// Linking curvature condition per sample side: kappa_r <= 0 passes, otherwise
// ell < 1/kappa_r. Fans never fail in the plane (the edge-condition eigenvalue
// set is empty), so only 1D strata are checked.
NonsingularityReport check_nonsingularity(const std::vector<SkeletalStructure>& skeletons,
                                          const LinkingAssignment& assignment);

struct LevelSetCurve {
    int object = -1;
    Polyline points;
    bool is_fan_arc = false;
    int fold_overs = 0;
};

struct LevelSet {
    double t = 0.0;
    std::vector<LevelSetCurve> curves;
    int total_fold_overs = 0;
    double total_length = 0.0;
};

// Level polylines of the combined flow at time t; fold-overs are counted where
// a flowed segment reverses orientation relative to its base segment.
LevelSet level_set(const std::vector<SkeletalStructure>& skeletons,
                   const LinkingAssignment& assignment, double t, double fan_step = M_PI / 256.0);

}  // namespace skelink
