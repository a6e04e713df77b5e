#include "skelink/skelink.h"

#include <cstring>
#include <string>

#include "json.hpp"
#include "report.hpp"
#include "svg.hpp"
#include "util.hpp"

using namespace skelink;
using ojson = nlohmann::ordered_json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = (char*)std::malloc(s.size() + 1);
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

slk_status fail(slk_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
slk_status guarded(Fn&& fn) {
    try {
        fn();
        return SLK_OK;
    } catch (const InputError& e) {
        return fail(SLK_ERR_INPUT, e.what());
    } catch (const HypothesisError& e) {
        return fail(SLK_ERR_HYPOTHESIS, e.what());
    } catch (const std::exception& e) {
        return fail(SLK_ERR_INTERNAL, e.what());
    }
}

AnalysisParams params_from(const slk_params* p) {
    AnalysisParams params;
    if (!p) return params;
    if (p->samples_per_boundary > 0) params.samples_per_boundary = p->samples_per_boundary;
    if (p->theta_min >= 0.0) params.theta_min = p->theta_min;
    if (p->fan_step > 0.0) params.fan_step = p->fan_step;
    if (p->gl_nodes > 1) params.gl_nodes = p->gl_nodes;
    params.oracle_resolution = p->oracle_resolution;
    if (p->variant && *p->variant) params.variant = p->variant;
    return params;
}

// The bounding override may be {"bounding":{...}} or the bare {...}.
std::string merged_config(const char* config_json, const char* bounding_json) {
    if (!bounding_json || !*bounding_json) return config_json;
    ojson doc = ojson::parse(config_json);
    ojson b = ojson::parse(bounding_json);
    doc["bounding"] = b.contains("bounding") ? b["bounding"] : b;
    return doc.dump();
}

BoundingSpec require_bounding(const std::string& text) {
    BoundingSpec spec;
    if (!parse_bounding_spec(text, spec))
        throw InputError("no bounding specification: provide a \"bounding\" entry or flags");
    return spec;
}

}  // namespace

struct slk_analysis {
    AnalysisResult result;
    std::string report_json_cache;
    std::string report_text_cache;
    std::string structure_json_cache;
};

extern "C" {

const char* slk_version(void) { return kToolVersion; }

const char* slk_last_error(void) { return g_last_error.c_str(); }

void slk_string_free(char* s) { std::free(s); }

void slk_params_init(slk_params* params) {
    if (!params) return;
    params->samples_per_boundary = 512;
    params->theta_min = 0.15;
    params->fan_step = M_PI / 256.0;
    params->gl_nodes = 16;
    params->oracle_resolution = 0;
    params->variant = "c";
}

slk_status slk_analyze(const char* config_json, const char* bounding_json,
                       const slk_params* params, slk_analysis** out) {
    if (!config_json || !out) return fail(SLK_ERR_INPUT, "null argument");
    *out = nullptr;
    return guarded([&]() {
        std::string text = merged_config(config_json, bounding_json);
        Configuration config = parse_configuration(text);
        BoundingSpec spec = require_bounding(text);
        auto handle = new slk_analysis;
        handle->result = run_analysis(config, spec, params_from(params));
        *out = handle;
    });
}

void slk_analysis_free(slk_analysis* a) { delete a; }

const char* slk_analysis_report_json(slk_analysis* a) {
    if (!a) return nullptr;
    if (a->report_json_cache.empty()) a->report_json_cache = report_json(a->result);
    return a->report_json_cache.c_str();
}

const char* slk_analysis_report_text(slk_analysis* a) {
    if (!a) return nullptr;
    if (a->report_text_cache.empty()) a->report_text_cache = report_text(a->result);
    return a->report_text_cache.c_str();
}

const char* slk_analysis_structure_json(slk_analysis* a) {
    if (!a) return nullptr;
    if (a->structure_json_cache.empty()) a->structure_json_cache = structure_json(a->result);
    return a->structure_json_cache.c_str();
}

slk_status slk_validate(const char* config_json, char** diagnostics_json_out) {
    if (!config_json || !diagnostics_json_out) return fail(SLK_ERR_INPUT, "null argument");
    return guarded([&]() {
        Configuration config = parse_configuration(config_json);
        ojson doc;
        ojson list = ojson::array();
        for (const Diagnostic& d : validate_configuration(config)) {
            ojson jd;
            jd["severity"] = d.severity == Diagnostic::Severity::Error     ? "error"
                             : d.severity == Diagnostic::Severity::Warning ? "warning"
                                                                           : "info";
            jd["code"] = d.code;
            jd["message"] = d.message;
            if (d.has_witness) jd["witness"] = {d.witness.x, d.witness.y};
            list.push_back(std::move(jd));
        }
        doc["diagnostics"] = std::move(list);
        *diagnostics_json_out = dup_string(doc.dump(2));
    });
}

slk_status slk_weights(const double* matrix, int n, const double* v, double* lambda_out,
                       double* w_out, double* wv_out, double* residual_out) {
    if (!matrix || n <= 0 || !w_out) return fail(SLK_ERR_INPUT, "null argument");
    return guarded([&]() {
        std::vector<std::vector<double>> entries(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) entries[i][j] = matrix[i * n + j];
        ProximityMatrix pm = proximity_matrix_from(entries);
        ProximityWeights weights = proximity_weights(pm);
        for (int i = 0; i < n; ++i) w_out[i] = weights.w[i];
        if (lambda_out) *lambda_out = weights.lambda;
        if (residual_out) *residual_out = weights.residual;
        if (v && wv_out) {
            std::vector<double> vv(v, v + n);
            std::vector<double> wv = renormalized_weights(weights.w, vv);
            for (int i = 0; i < n; ++i) wv_out[i] = wv[i];
        }
    });
}

slk_status slk_graph_components(const char* report_json, double edge_threshold,
                                double vertex_threshold, char** json_out) {
    if (!report_json || !json_out) return fail(SLK_ERR_INPUT, "null argument");
    return guarded([&]() {
        ojson doc = ojson::parse(report_json);
        if (!doc.contains("graph")) throw InputError("report contains no graph section");
        TieredGraph graph;
        for (const auto& v : doc["graph"]["vertices"])
            graph.vertex_height.push_back(v["s"].get<double>());
        for (const auto& e : doc["graph"]["edges"])
            graph.edges.push_back(
                {e["i"].get<int>() - 1, e["j"].get<int>() - 1, e["c"].get<double>()});

        VertexSubgraph vsub = vertex_threshold_subgraph(graph, vertex_threshold);
        // Components of the surviving vertex set under the edge threshold.
        std::vector<char> keep(graph.vertex_height.size(), 0);
        for (int vtx : vsub.vertices) keep[vtx] = 1;
        TieredGraph pruned;
        pruned.vertex_height = graph.vertex_height;
        for (const auto& e : vsub.edges)
            if (e.height >= edge_threshold) pruned.edges.push_back(e);
        auto comps = edge_threshold_subgraph(pruned, edge_threshold);

        ojson out;
        out["edge_threshold"] = edge_threshold;
        out["vertex_threshold"] = vertex_threshold;
        ojson jcomps = ojson::array();
        for (const auto& comp : comps) {
            ojson jc = ojson::array();
            for (int m : comp)
                if (keep[m]) jc.push_back(m + 1);
            if (!jc.empty()) jcomps.push_back(std::move(jc));
        }
        out["components"] = std::move(jcomps);
        ojson jverts = ojson::array();
        for (int vtx : vsub.vertices) jverts.push_back(vtx + 1);
        out["vertices"] = std::move(jverts);
        ojson jedges = ojson::array();
        for (const auto& e : vsub.edges)
            if (e.height >= edge_threshold) {
                ojson je;
                je["i"] = e.i + 1;
                je["j"] = e.j + 1;
                je["c"] = e.height;
                jedges.push_back(std::move(je));
            }
        out["edges"] = std::move(jedges);
        *json_out = dup_string(out.dump(2));
    });
}

slk_status slk_render_structure(const char* structure_json, const char* kind, char** svg_out) {
    if (!structure_json || !kind || !svg_out) return fail(SLK_ERR_INPUT, "null argument");
    return guarded([&]() {
        StructureData data = parse_structure_json(structure_json);
        std::string k = kind;
        std::string svg;
        if (k == "overlay")
            svg = svg_overlay(data);
        else if (k == "regions")
            svg = svg_regions(data);
        else if (k == "levelsets")
            svg = svg_level_sets(data, {0.0, 0.25, 0.5, 0.75, 1.0});
        else
            throw InputError("unknown figure kind: " + k);
        *svg_out = dup_string(svg);
    });
}

slk_status slk_render_graph(const char* report_json, char** svg_out) {
    if (!report_json || !svg_out) return fail(SLK_ERR_INPUT, "null argument");
    return guarded([&]() {
        ojson doc = ojson::parse(report_json);
        if (!doc.contains("graph")) throw InputError("report contains no graph section");
        TieredGraph graph;
        for (const auto& v : doc["graph"]["vertices"])
            graph.vertex_height.push_back(v["s"].get<double>());
        for (const auto& e : doc["graph"]["edges"])
            graph.edges.push_back(
                {e["i"].get<int>() - 1, e["j"].get<int>() - 1, e["c"].get<double>()});
        *svg_out = dup_string(svg_tiered_graph(graph));
    });
}

slk_status slk_oracle(const char* config_json, const char* bounding_json, int resolution,
                      const slk_params* params, char** table_json_out, char** raster_pgm_out,
                      char** legend_json_out) {
    if (!config_json || !table_json_out) return fail(SLK_ERR_INPUT, "null argument");
    return guarded([&]() {
        std::string text = merged_config(config_json, bounding_json);
        Configuration config = parse_configuration(text);
        BoundingSpec spec = require_bounding(text);
        AnalysisParams ap = params_from(params);

        SkeletonParams sp;
        sp.samples_per_boundary = ap.samples_per_boundary;
        sp.theta_min = ap.theta_min;
        std::vector<SkeletalStructure> skeletons(config.size());
        parallel_for(0, (int64_t)config.size(), [&](int64_t oi) {
            skeletons[oi] = compute_skeleton(config.objects[oi], sp);
            skeletons[oi].object_index = (int)oi;
        });
        BoundingRegion bounding = build_bounding_region(config, spec);
        LinkingParams lp;
        lp.fan_step = ap.fan_step;
        lp.theta_min = ap.theta_min;
        LinkingAxis axis = compute_linking_axis(config, skeletons, bounding, lp);
        LinkingAssignment assignment =
            compute_linking_assignment(config, skeletons, axis, bounding, lp);

        OracleGrid grid = grid_labels(config, bounding, resolution, skeletons, assignment);
        VolumeTable table = oracle_volumes(grid, config);

        ojson doc;
        doc["source"] = "oracle";
        doc["resolution"] = resolution;
        ojson rows = ojson::array();
        for (const VolumeRow& row : table.rows) {
            ojson r;
            r["i"] = row.object + 1;
            std::string t = row.kind == LinkTarget::Object   ? std::to_string(row.target + 1)
                            : row.kind == LinkTarget::SelfLink ? "self"
                                                               : "inf";
            r["target"] = t;
            r["vol_omega"] = round6(row.vol_omega);
            r["vol_n"] = round6(row.vol_n);
            r["vol_r"] = round6(row.vol_r);
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        ojson areas = ojson::array();
        for (double a : table.object_volume) areas.push_back(round6(a));
        doc["object_area"] = std::move(areas);
        *table_json_out = dup_string(doc.dump(2));
        if (raster_pgm_out) *raster_pgm_out = dup_string(grid_raster_pgm(grid));
        if (legend_json_out) *legend_json_out = dup_string(grid_legend_json(grid));
    });
}

}  // extern "C"
