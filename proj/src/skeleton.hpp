#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "geom.hpp"

namespace skelink {

struct BoundaryPoint {
    Vec2 p;
    double arc = 0.0;        // arc-length coordinate along the original polygon
    bool corner = false;     // original vertex with a sharp turn
    bool reflex = false;     // sharp turn with the exterior on the convex side
    double kappa_std = 0.0;  // signed curvature, CCW convention (convex > 0); 0 at corners
    int polygon_vertex = -1; // original vertex index, or -1 for inserted points
};

struct ResampledBoundary {
    Polygon polygon;                 // original CCW contour
    std::vector<BoundaryPoint> pts;  // cyclic, ordered by arc
    std::vector<double> vertex_arc;  // arc coordinate of each original vertex
    double perimeter = 0.0;
    double step = 0.0;  // target spacing

    double cyclic_arc_distance(double a, double b) const;
    // Index of the resampled point nearest to the given arc coordinate.
    int nearest_point_index(double arc) const;
    // Signed curvature estimate at an arc coordinate; corner flag reported separately.
    double curvature_at_arc(double arc, bool& at_corner) const;
    // Outward normal of the polygon edge under this arc coordinate.
    Vec2 outward_normal_at_arc(double arc) const;
};

struct SideRecord {
    bool valid = false;
    Vec2 u;                  // unit direction, skeleton point -> foot
    double r = 0.0;          // radius (distance to the foot)
    Vec2 foot;
    double foot_arc = 0.0;
    double rho = 0.0;        // medial density u . n
    double kappa_r = 0.0;    // principal radial curvature
    bool foot_at_corner = false;
    double blum_deviation = 0.0;  // angle between u and the outward boundary normal at the foot
};

struct SkeletalSample {
    Vec2 x;
    double arc = 0.0;  // along the stratum
    SideRecord side[2];  // side 0: u on the left of the walk direction
};

struct Stratum {
    std::vector<SkeletalSample> samples;
    double length = 0.0;
    bool corner_end[2] = {false, false};   // endpoint converges to a polygon corner (r -> 0)
    int corner_vertex[2] = {-1, -1};
};

struct Fan {
    Vec2 center;
    double r = 0.0;               // 0 for polygon-corner fans
    double theta0 = 0.0;          // CCW span theta0 -> theta1, theta1 > theta0
    double theta1 = 0.0;
    bool at_boundary_corner = false;
    int vertex_index = -1;        // original polygon vertex for corner fans
};

struct SkeletalStructure {
    int object_index = -1;
    ResampledBoundary boundary;
    std::vector<Stratum> strata;
    std::vector<Fan> fans;
    int pruned_edges = 0;
    double max_blum_deviation = 0.0;
    double shoelace_area = 0.0;

    size_t sample_count() const {
        size_t n = 0;
        for (const Stratum& s : strata) n += s.samples.size();
        return n;
    }
};

struct SkeletonParams {
    int samples_per_boundary = 512;
    double theta_min = 0.15;        // leaf spurs below this foot-subtense angle are pruned
    double corner_angle = 0.35;     // rad; original-vertex turns above this count as corners
};

// Discrete Blum-style skeleton of one contour: interior Voronoi edges of the
// densely resampled boundary, spur-pruned, with exact per-side radii and feet
// recomputed against the polygon. Throws InputError when the contour is too
// thin for the resolution (nothing survives pruning and no interior vertex exists).
SkeletalStructure compute_skeleton(const Contour& contour, const SkeletonParams& params = {});

ResampledBoundary resample_boundary(const Polygon& polygon, int samples, double corner_angle);

// rho = u . n for the stratum normal n on the side of u.
double medial_density(const Vec2& u, const Vec2& stratum_tangent);

// kappa_r from the boundary curvature at the foot (kappa_b in the radial
// convention: positive where the radial lines converge forward).
double radial_curvature_from_boundary(double kappa_b, double r);

// Inverse map: boundary curvature reached by evolving kappa_r to the boundary.
double boundary_curvature_from_radial(double kappa_r, double r);

// Angle between u and the outward boundary normal at the foot (0 = Blum).
double check_partial_blum(const ResampledBoundary& boundary, const Vec2& u, double foot_arc);

}  // namespace skelink
