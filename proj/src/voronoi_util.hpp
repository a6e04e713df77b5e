#pragma once

#include <vector>

#include "geom.hpp"

namespace skelink {

// Plain-segment view of a point-site Voronoi diagram, with infinite edges
// clipped to a caller-supplied box. Each edge keeps the indices of its two
// generating sites.
struct VoronoiEdge {
    Vec2 a, b;
    int site_a = -1;
    int site_b = -1;
    bool clipped_a = false;  // endpoint produced by clipping an unbounded edge
    bool clipped_b = false;
};

// Sites are snapped to an integer lattice internally (about 1e-8 of the spread),
// so exactly duplicated points must be removed by the caller beforehand.
std::vector<VoronoiEdge> voronoi_edges(const std::vector<Vec2>& sites, const Box& clip);

}  // namespace skelink
