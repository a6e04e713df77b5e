#pragma once

#include <array>
#include <map>
#include <vector>

#include "config.hpp"
#include "geom.hpp"
#include "skeleton.hpp"

namespace skelink {

enum class LinkTarget { Object, SelfLink, Infinity };

struct SideLink {
    double ell = 0.0;
    LinkTarget kind = LinkTarget::Infinity;
    int target = -1;  // object index for Object; own index for SelfLink; -1 for Infinity
    Vec2 terminal;
    bool capped = false;  // ended on the bounding boundary / threshold cap
};

struct FanDirLink {
    double theta = 0.0;
    Vec2 dir;
    double r = 0.0;
    SideLink link;
};

struct StratumLinks {
    std::vector<std::array<SideLink, 2>> sides;  // parallel to Stratum::samples
};

struct FanLinks {
    std::vector<FanDirLink> dirs;
};

struct ObjectLinks {
    std::vector<StratumLinks> strata;
    std::vector<FanLinks> fans;
};

struct LinkingAssignment {
    std::vector<ObjectLinks> objects;
    double fan_step = M_PI / 256.0;
};

struct AxisStratum {
    Polyline polyline;
    int obj_a = -1, obj_b = -1;  // unordered site objects; equal for self-linking
    bool self_link = false;
    bool bounding_end[2] = {false, false};  // polyline end truncated by the bounding region
};

struct LinkingAxis {
    std::vector<AxisStratum> strata;
    std::vector<Vec2> branch_points;

    struct Seg {
        Vec2 a, b;
        int stratum = -1;
    };
    std::vector<Seg> segments;  // flat view for ray queries

    bool has_pair_stratum(int i, int j) const;
};

struct LinkingParams {
    double fan_step = M_PI / 256.0;
    double theta_min = 0.15;  // same-object exterior pruning angle
};

// Exterior Voronoi structure of the union of the resampled object boundaries,
// clipped to the bounding region, with same-object hair pruned away (strata
// rooted at reflex corners are kept: they are genuine self-linking bisectors).
// Throws InputError when an object pokes outside the bounding region.
LinkingAxis compute_linking_axis(const Configuration& config,
                                 const std::vector<SkeletalStructure>& skeletons,
                                 const BoundingRegion& bounding,
                                 const LinkingParams& params = {});

// For every sample side and fan direction: march the radial ray outward to its
// first hit on the axis (-> linked, ell = hit parameter) or to the bounding
// cap (-> unlinked). Hits are exact ray/segment intersections; a bisection
// fallback on the nearest-feature predicate guards rays that slip past the
// discretized axis near its roots.
LinkingAssignment compute_linking_assignment(const Configuration& config,
                                             const std::vector<SkeletalStructure>& skeletons,
                                             const LinkingAxis& axis,
                                             const BoundingRegion& bounding,
                                             const LinkingParams& params = {});

struct SideRun {
    int object = -1, stratum = -1, side = -1;
    int begin = 0, end = 0;  // sample range [begin, end)
    LinkTarget kind = LinkTarget::Infinity;
    int target = -1;
};

struct FanRun {
    int object = -1, fan = -1;
    int begin = 0, end = 0;  // direction range [begin, end)
    LinkTarget kind = LinkTarget::Infinity;
    int target = -1;
};

struct StrataPartition {
    std::vector<SideRun> side_runs;
    std::vector<FanRun> fan_runs;

    bool pair_linked(int i, int j) const;  // some run of object i targets object j
};

StrataPartition partition_strata(const std::vector<SkeletalStructure>& skeletons,
                                 const LinkingAssignment& assignment);

struct RegionKey {
    int object = -1;
    LinkTarget kind = LinkTarget::Infinity;
    int target = -1;

    bool operator<(const RegionKey& o) const {
        if (object != o.object) return object < o.object;
        if (kind != o.kind) return (int)kind < (int)o.kind;
        return target < o.target;
    }
};

struct LinkingRegions {
    // Polygonal sweeps per labeled run; a region is the union of its pieces.
    std::map<RegionKey, std::vector<Polygon>> internal_pieces;   // Omega_{i->...}
    std::map<RegionKey, std::vector<Polygon>> external_pieces;   // N_{i->...}
    std::map<RegionKey, std::vector<Polyline>> boundary_pieces;  // B_{i->...}
};

LinkingRegions extract_regions(const std::vector<SkeletalStructure>& skeletons,
                               const LinkingAssignment& assignment,
                               const StrataPartition& partition);

}  // namespace skelink
