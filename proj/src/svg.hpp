#pragma once

#include <string>
#include <vector>

#include "geom.hpp"
#include "linking.hpp"
#include "proximity.hpp"
#include "report.hpp"

namespace skelink {

// Configuration overlay: objects, skeleton, linking axis, bounding boundary.
std::string svg_overlay(const StructureData& data);

// Region-colored figure: internal and external pieces of each linked pair share
// a hue (the external piece lighter), unlinked pieces gray.
std::string svg_regions(const StructureData& data);

// Level sets of the flow at the given times.
std::string svg_level_sets(const StructureData& data, const std::vector<double>& times);

// Tiered graph: significance on the horizontal axis, closeness as the height
// of dotted edge stems.
std::string svg_tiered_graph(const TieredGraph& graph);

}  // namespace skelink
