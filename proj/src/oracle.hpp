#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "integrate.hpp"
#include "linking.hpp"
#include "skeleton.hpp"

namespace skelink {

// Deterministic lattice labeling of the bounded plane. Every exterior cell is
// classified by continuing the ray from its nearest boundary point until the
// nearest feature changes (adaptive bisection on that predicate), entirely
// independent of the skeletal integrals it cross-checks. Interior cells are
// attributed to internal linking regions through the skeleton's foot-point
// map only.
struct OracleGrid {
    enum Kind : uint8_t { OutsideBounding = 0, InsideObject = 1, Exterior = 2 };

    struct CellLabel {
        uint8_t kind = OutsideBounding;
        int16_t object = -1;  // owner (containing or nearest) object
        uint8_t tkind = 2;    // 0 Object, 1 SelfLink, 2 Infinity
        int16_t target = -1;
    };

    int nx = 0, ny = 0;
    Vec2 origin;
    double cell = 0.0;
    std::vector<CellLabel> cells;  // row-major, centers at origin + (i+1/2, j+1/2)*cell

    double cell_area() const { return cell * cell; }
    const CellLabel& at(int ix, int iy) const { return cells[(size_t)iy * nx + ix]; }
};

// resolution = cells across the longer axis; must be >= 256.
OracleGrid grid_labels(const Configuration& config, const BoundingRegion& bounding,
                       int resolution, const std::vector<SkeletalStructure>& skeletons,
                       const LinkingAssignment& assignment);

VolumeTable oracle_volumes(const OracleGrid& grid, const Configuration& config);

// Binary PGM (P5) of the label codes plus a JSON legend mapping codes to labels.
std::string grid_raster_pgm(const OracleGrid& grid);
std::string grid_legend_json(const OracleGrid& grid);

}  // namespace skelink
