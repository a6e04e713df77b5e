#pragma once

#include <functional>
#include <map>
#include <vector>

#include "linking.hpp"
#include "skeleton.hpp"

namespace skelink {

// I(s) = integral_0^s |1 - t*kappa| dt. The polynomial s - (kappa/2) s^2 up to
// the focal point; past it the Jacobian is folded back with absolute value so
// swept areas stay correct on point-feature strata.
double integrand_poly(double s, double kappa);

// I(b) - I(a) for the exterior piece [a, b] of a ray.
double integrand_poly_between(double a, double b, double kappa);

// A view of one sample side handed to integrand callbacks.
struct SideView {
    int object, stratum, sample, side;
    const SkeletalSample* s;
    const SideRecord* rec;
};

// Plain medial integral over both sides of the strata (fan points carry no
// 1-dimensional measure). Trapezoid along each stratum.
double skeletal_integral(const SkeletalStructure& sk,
                         const std::function<double(const SideView&)>& g);

double total_medial_measure(const SkeletalStructure& sk);

// Boundary integral via the radial map: integral of g over the boundary equals
// the medial integral of g(foot) * det(I - r S_rad). Fan arcs contribute
// g * r dtheta. Throws HypothesisError when the partial Blum deviation exceeds
// the threshold anywhere g is nonzero; corner feet are excluded from the domain.
double boundary_integral(const SkeletalStructure& sk,
                         const std::function<double(const Vec2&, const SideView&)>& g,
                         double blum_threshold = 0.1);

struct VolumeRow {
    int object = -1;
    LinkTarget kind = LinkTarget::Infinity;
    int target = -1;
    double vol_omega = 0.0;
    double vol_n = 0.0;
    double vol_r = 0.0;
};

struct VolumeTable {
    std::vector<VolumeRow> rows;          // ordered by (object, kind, target)
    std::vector<double> object_volume;    // skeletal-integral object areas
    std::vector<double> object_shoelace;  // polygon areas for cross-checking
    std::vector<double> object_steiner;   // total-neighborhood areas
    int object_count = 0;

    const VolumeRow* find(int object, LinkTarget kind, int target) const;
    double omega(int object, LinkTarget kind, int target) const;
    double external(int object, LinkTarget kind, int target) const;
    double total(int object, LinkTarget kind, int target) const;
};

// All linking-region areas as skeletal integrals of I(r), I(ell)-I(r), I(ell).
VolumeTable region_volumes(const std::vector<SkeletalStructure>& skeletons,
                           const LinkingAssignment& assignment);

// Object area as the skeletal integral of I(r) (fan sectors included).
double weyl_volume(const SkeletalStructure& sk);

// Total-neighborhood area as the skeletal integral of I(ell) - I(r).
double steiner_volume(const SkeletalStructure& sk, const ObjectLinks& links);

struct RegionIntegral {
    double total = 0.0;
    double interior = 0.0;
    double exterior = 0.0;
    std::map<RegionKey, double> per_label;
};

// Integral of a planar function over the bounded region, decomposed into the
// interior part (radial flow, t in [0,r]) and exterior part (t in [r,ell]).
// Gauss-Legendre quadrature with the given node count per ray segment.
RegionIntegral region_integral(const std::vector<SkeletalStructure>& skeletons,
                               const LinkingAssignment& assignment,
                               const std::function<double(const Vec2&)>& g, int nodes = 16);

// Indicator-of-polygon integrands use exact ray clipping instead of quadrature.
RegionIntegral region_integral_indicator(const std::vector<SkeletalStructure>& skeletons,
                                         const LinkingAssignment& assignment, const Polygon& q);

// Area of a polygon as the skeletal integral of the weighted ray-intersection
// length m_Q; identical code path as region_integral_indicator.
double crofton_volume(const std::vector<SkeletalStructure>& skeletons,
                      const LinkingAssignment& assignment, const Polygon& q);

}  // namespace skelink
