#pragma once

#include <string>
#include <vector>

#include "geom.hpp"

namespace skelink {

// Closed boundary of one object, stored counter-clockwise (interior on the left).
struct Contour {
    Polygon vertices;
};

struct Configuration {
    std::vector<Contour> objects;
    std::vector<std::string> names;  // parallel to objects; may hold empty strings

    size_t size() const { return objects.size(); }
};

enum class BoundingKind { Box, Hull, Threshold };

struct BoundingSpec {
    BoundingKind kind = BoundingKind::Hull;
    Vec2 box_lo, box_hi;   // Box
    double margin = 0.0;   // Hull
    double tau = 0.0;      // Threshold: cap on the exterior reach of the linking rays
};

struct BoundingRegion {
    BoundingKind kind = BoundingKind::Hull;
    // For Box/Hull: the closed CCW boundary of the bounded region.
    // For Threshold: empty; rays are capped at distance tau past their foot.
    Polygon boundary;
    double tau = 0.0;
    // Extent used to clip the exterior axis structure (covers everything reachable).
    Box working_box;

    bool has_boundary() const { return kind != BoundingKind::Threshold; }
    bool point_inside(const Vec2& p) const;
};

struct Diagnostic {
    enum class Severity { Info, Warning, Error };
    Severity severity;
    std::string code;
    std::string message;
    Vec2 witness;
    bool has_witness = false;
};

// Parses the JSON configuration document:
//   {"objects":[{"name":str?,"vertices":[[x,y],...]},...],
//    "bounding":{"kind":"box"|"hull"|"threshold","box":[[x0,y0],[x1,y1]]?,"margin":num?,"tau":num?}}
// Orientation is normalized to CCW here and never re-checked downstream.
// Throws InputError on malformed documents, self-intersecting contours, or
// overlapping objects (message names the pair and a witness point).
Configuration parse_configuration(const std::string& text);

// Exact round-trip companion of parse_configuration.
std::string serialize_configuration(const Configuration& config);

// Returns the bounding spec embedded in the document, if any.
bool parse_bounding_spec(const std::string& text, BoundingSpec& out);

BoundingRegion build_bounding_region(const Configuration& config, const BoundingSpec& spec);

// Pure report: never throws; degenerate inputs come back as Error entries.
std::vector<Diagnostic> validate_configuration(const Configuration& config,
                                               double sampling_resolution = 0.0);

}  // namespace skelink
