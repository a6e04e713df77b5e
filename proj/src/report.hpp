#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "flow.hpp"
#include "integrate.hpp"
#include "invariants.hpp"
#include "linking.hpp"
#include "oracle.hpp"
#include "proximity.hpp"
#include "skeleton.hpp"

namespace skelink {

inline constexpr const char* kToolVersion = "0.1.0";

struct AnalysisParams {
    int samples_per_boundary = 512;
    double theta_min = 0.15;
    double fan_step = M_PI / 256.0;
    int gl_nodes = 16;
    int oracle_resolution = 0;  // 0 = skip the grid cross-check
    std::string variant = "c";  // proximity matrix variant: "c" or "ca"
};

struct AnalysisResult {
    Configuration config;
    BoundingSpec bounding_spec;
    BoundingRegion bounding;
    AnalysisParams params;

    std::vector<SkeletalStructure> skeletons;
    LinkingAxis axis;
    LinkingAssignment assignment;
    StrataPartition partition;
    LinkingRegions regions;
    NonsingularityReport nonsingularity;
    VolumeTable volumes;
    ClosenessTable closeness_table;
    SignificanceVector significance_vector;

    ProximityMatrix pmatrix;
    bool weights_ok = false;
    std::string weights_error;
    ProximityWeights weights;
    std::vector<double> v_vol, v_lk;
    std::vector<double> weights_vvol, weights_vlk;

    TieredGraph graph;
    std::vector<MergeEvent> merges;

    bool has_oracle = false;
    VolumeTable oracle_table;
    ClosenessTable oracle_closeness;
    SignificanceVector oracle_significance;
    double oracle_max_rel_disagreement = 0.0;
};

AnalysisResult run_analysis(const Configuration& config, const BoundingSpec& spec,
                            const AnalysisParams& params = {});

// Deterministic JSON report (fixed key order, 6 significant digits).
std::string report_json(const AnalysisResult& result);
std::string report_text(const AnalysisResult& result);

// Serialized linking structure: boundaries, per-sample radial and linking data,
// axis polylines, region polygons. Enough to re-render every figure.
std::string structure_json(const AnalysisResult& result);

struct StructureData {
    std::vector<Polygon> objects;
    Polygon bounding;
    std::vector<Polyline> skeleton;
    std::vector<Polyline> axis;
    LinkingRegions regions;

    struct FlowChain {
        int object = -1;
        std::vector<Vec2> x;
        std::vector<Vec2> u;
        std::vector<double> r, ell;
    };
    std::vector<FlowChain> flow_chains;  // one per stratum side

    struct FlowFan {
        int object = -1;
        Vec2 center;
        double r = 0.0;
        std::vector<double> theta, ell;
    };
    std::vector<FlowFan> flow_fans;
};

StructureData structure_from_result(const AnalysisResult& result);
StructureData parse_structure_json(const std::string& text);

double round6(double x);

}  // namespace skelink
