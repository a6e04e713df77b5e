#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "util.hpp"

namespace skelink {

using ojson = nlohmann::ordered_json;

double round6(double x) {
    if (!std::isfinite(x)) return 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return std::strtod(buf, nullptr);
}

namespace {

std::string target_name(LinkTarget kind, int target) {
    switch (kind) {
        case LinkTarget::Object: return std::to_string(target + 1);
        case LinkTarget::SelfLink: return "self";
        case LinkTarget::Infinity: return "inf";
    }
    return "?";
}

ojson matrix_json(const std::vector<std::vector<double>>& m) {
    ojson rows = ojson::array();
    for (const auto& row : m) {
        ojson r = ojson::array();
        for (double v : row) r.push_back(round6(v));
        rows.push_back(std::move(r));
    }
    return rows;
}

ojson vector_json(const std::vector<double>& v) {
    ojson out = ojson::array();
    for (double x : v) out.push_back(round6(x));
    return out;
}

ojson volume_rows_json(const VolumeTable& table) {
    ojson rows = ojson::array();
    for (const VolumeRow& row : table.rows) {
        ojson r;
        r["i"] = row.object + 1;
        r["target"] = target_name(row.kind, row.target);
        r["vol_omega"] = round6(row.vol_omega);
        r["vol_n"] = round6(row.vol_n);
        r["vol_r"] = round6(row.vol_r);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<double> normalized_or_empty(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum <= 0.0) return {};
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / sum;
    for (double x : out)
        if (x <= 0.0) return {};
    return out;
}

}  // namespace

AnalysisResult run_analysis(const Configuration& config, const BoundingSpec& spec,
                            const AnalysisParams& params) {
    AnalysisResult result;
    result.config = config;
    result.bounding_spec = spec;
    result.params = params;

    SkeletonParams sp;
    sp.samples_per_boundary = params.samples_per_boundary;
    sp.theta_min = params.theta_min;
    result.skeletons.resize(config.size());
    parallel_for(0, (int64_t)config.size(), [&](int64_t oi) {
        result.skeletons[oi] = compute_skeleton(config.objects[oi], sp);
        result.skeletons[oi].object_index = (int)oi;
    });

    result.bounding = build_bounding_region(config, spec);

    LinkingParams lp;
    lp.fan_step = params.fan_step;
    lp.theta_min = params.theta_min;
    result.axis = compute_linking_axis(config, result.skeletons, result.bounding, lp);
    result.assignment =
        compute_linking_assignment(config, result.skeletons, result.axis, result.bounding, lp);
    result.partition = partition_strata(result.skeletons, result.assignment);
    result.regions = extract_regions(result.skeletons, result.assignment, result.partition);
    result.nonsingularity = check_nonsingularity(result.skeletons, result.assignment);
    result.volumes = region_volumes(result.skeletons, result.assignment);
    result.closeness_table = closeness(result.volumes);
    result.significance_vector = significance(result.volumes);

    result.pmatrix = proximity_matrix(result.closeness_table, params.variant);
    try {
        result.weights = proximity_weights(result.pmatrix);
        result.weights_ok = true;
    } catch (const HypothesisError& e) {
        result.weights_ok = false;
        result.weights_error = e.what();
    }

    result.v_vol = normalized_or_empty(result.volumes.object_volume);
    std::vector<double> lk(config.size(), 0.0);
    for (size_t i = 0; i < config.size(); ++i)
        for (size_t j = 0; j < config.size(); ++j)
            if (i != j) lk[i] += result.volumes.omega((int)i, LinkTarget::Object, (int)j);
    result.v_lk = normalized_or_empty(lk);
    if (result.weights_ok && !result.v_vol.empty())
        result.weights_vvol = renormalized_weights(result.weights.w, result.v_vol);
    if (result.weights_ok && !result.v_lk.empty())
        result.weights_vlk = renormalized_weights(result.weights.w, result.v_lk);

    result.graph =
        build_tiered_graph(result.closeness_table, result.significance_vector, params.variant);
    result.merges = merge_sequence(result.graph);

    if (params.oracle_resolution > 0) {
        OracleGrid grid = grid_labels(config, result.bounding, params.oracle_resolution,
                                      result.skeletons, result.assignment);
        result.oracle_table = oracle_volumes(grid, config);
        result.oracle_closeness = closeness(result.oracle_table);
        result.oracle_significance = significance(result.oracle_table);
        result.has_oracle = true;
        double worst = 0.0;
        for (const VolumeRow& row : result.volumes.rows) {
            const VolumeRow* orow = result.oracle_table.find(row.object, row.kind, row.target);
            double ov = orow ? orow->vol_n : 0.0;
            double oo = orow ? orow->vol_omega : 0.0;
            double scale = std::max({row.vol_r, orow ? orow->vol_r : 0.0, 1e-12});
            worst = std::max(worst, std::abs(row.vol_omega - oo) / scale);
            worst = std::max(worst, std::abs(row.vol_n - ov) / scale);
        }
        result.oracle_max_rel_disagreement = worst;
    }
    return result;
}

std::string report_json(const AnalysisResult& result) {
    ojson doc;
    {
        ojson tool;
        tool["name"] = "skelink";
        tool["version"] = kToolVersion;
        ojson p;
        p["samples_per_boundary"] = result.params.samples_per_boundary;
        p["theta_min"] = round6(result.params.theta_min);
        p["fan_step"] = round6(result.params.fan_step);
        p["gl_nodes"] = result.params.gl_nodes;
        p["oracle_resolution"] = result.params.oracle_resolution;
        p["variant"] = result.params.variant;
        tool["parameters"] = std::move(p);
        doc["tool"] = std::move(tool);
    }
    {
        ojson conf;
        ojson objs = ojson::array();
        for (size_t i = 0; i < result.config.size(); ++i) {
            ojson o;
            if (!result.config.names[i].empty()) o["name"] = result.config.names[i];
            ojson verts = ojson::array();
            for (const Vec2& p : result.config.objects[i].vertices) verts.push_back({p.x, p.y});
            o["vertices"] = std::move(verts);
            objs.push_back(std::move(o));
        }
        conf["objects"] = std::move(objs);
        ojson b;
        switch (result.bounding_spec.kind) {
            case BoundingKind::Box:
                b["kind"] = "box";
                b["box"] = {{result.bounding_spec.box_lo.x, result.bounding_spec.box_lo.y},
                            {result.bounding_spec.box_hi.x, result.bounding_spec.box_hi.y}};
                break;
            case BoundingKind::Hull:
                b["kind"] = "hull";
                b["margin"] = result.bounding_spec.margin;
                break;
            case BoundingKind::Threshold:
                b["kind"] = "threshold";
                b["tau"] = result.bounding_spec.tau;
                break;
        }
        conf["bounding"] = std::move(b);
        doc["configuration"] = std::move(conf);
    }
    {
        ojson objs = ojson::array();
        for (size_t i = 0; i < result.skeletons.size(); ++i) {
            const SkeletalStructure& sk = result.skeletons[i];
            ojson o;
            o["index"] = (int)i + 1;
            if (!result.config.names[i].empty()) o["name"] = result.config.names[i];
            o["area_shoelace"] = round6(sk.shoelace_area);
            o["area_skeletal"] = round6(result.volumes.object_volume[i]);
            o["perimeter"] = round6(polygon_perimeter(result.config.objects[i].vertices));
            ojson stats;
            stats["strata"] = (int)sk.strata.size();
            stats["samples"] = (int)sk.sample_count();
            stats["fans"] = (int)sk.fans.size();
            stats["pruned_edges"] = sk.pruned_edges;
            stats["max_partial_blum_deviation_rad"] = round6(sk.max_blum_deviation);
            o["skeleton"] = std::move(stats);
            objs.push_back(std::move(o));
        }
        doc["objects"] = std::move(objs);
    }
    {
        ojson ns;
        ns["source"] = "skeletal";
        ns["checked_sides"] = result.nonsingularity.checked;
        ns["pass"] = result.nonsingularity.pass();
        ns["failures"] = (int)result.nonsingularity.failures.size();
        ns["worst_margin"] =
            result.nonsingularity.worst_margin == std::numeric_limits<double>::max()
                ? ojson(nullptr)
                : ojson(round6(result.nonsingularity.worst_margin));
        doc["nonsingularity"] = std::move(ns);
    }
    {
        ojson vols;
        vols["source"] = "skeletal";
        vols["rows"] = volume_rows_json(result.volumes);
        vols["object_area"] = vector_json(result.volumes.object_volume);
        vols["object_area_shoelace"] = vector_json(result.volumes.object_shoelace);
        vols["object_total_neighborhood"] = vector_json(result.volumes.object_steiner);
        doc["volumes"] = std::move(vols);
    }
    if (result.has_oracle) {
        ojson vols;
        vols["source"] = "oracle";
        vols["resolution"] = result.params.oracle_resolution;
        vols["rows"] = volume_rows_json(result.oracle_table);
        vols["max_rel_disagreement"] = round6(result.oracle_max_rel_disagreement);
        doc["volumes_oracle"] = std::move(vols);
    }
    {
        ojson cl;
        cl["source"] = "skeletal";
        cl["c_dir"] = matrix_json(result.closeness_table.c_dir);
        cl["c"] = matrix_json(result.closeness_table.c);
        cl["c_add"] = matrix_json(result.closeness_table.c_add);
        doc["closeness"] = std::move(cl);
        ojson sig;
        sig["source"] = "skeletal";
        sig["s"] = vector_json(result.significance_vector.s);
        sig["s_abs"] = vector_json(result.significance_vector.s_abs);
        doc["significance"] = std::move(sig);
    }
    if (result.has_oracle) {
        ojson cl;
        cl["source"] = "oracle";
        cl["c_dir"] = matrix_json(result.oracle_closeness.c_dir);
        cl["c"] = matrix_json(result.oracle_closeness.c);
        cl["c_add"] = matrix_json(result.oracle_closeness.c_add);
        cl["s"] = vector_json(result.oracle_significance.s);
        doc["oracle_invariants"] = std::move(cl);
    }
    {
        ojson prox;
        prox["variant"] = result.pmatrix.variant;
        prox["matrix"] = matrix_json(result.pmatrix.p);
        if (result.weights_ok) {
            prox["lambda"] = round6(result.weights.lambda);
            prox["residual"] = round6(result.weights.residual);
            prox["iterations"] = result.weights.iterations;
            prox["weights"] = vector_json(result.weights.w);
            if (!result.v_vol.empty()) prox["v_vol"] = vector_json(result.v_vol);
            if (!result.v_lk.empty()) prox["v_lk"] = vector_json(result.v_lk);
            if (!result.weights_vvol.empty())
                prox["weights_v_vol"] = vector_json(result.weights_vvol);
            if (!result.weights_vlk.empty())
                prox["weights_v_lk"] = vector_json(result.weights_vlk);
        } else {
            prox["error"] = result.weights_error;
        }
        doc["proximity"] = std::move(prox);
    }
    {
        ojson graph;
        ojson verts = ojson::array();
        for (size_t i = 0; i < result.graph.vertex_height.size(); ++i) {
            ojson v;
            v["index"] = (int)i + 1;
            v["s"] = round6(result.graph.vertex_height[i]);
            verts.push_back(std::move(v));
        }
        graph["vertices"] = std::move(verts);
        ojson edges = ojson::array();
        for (const auto& e : result.graph.edges) {
            ojson je;
            je["i"] = e.i + 1;
            je["j"] = e.j + 1;
            je["c"] = round6(e.height);
            edges.push_back(std::move(je));
        }
        graph["edges"] = std::move(edges);
        ojson events = ojson::array();
        for (const MergeEvent& ev : result.merges) {
            ojson je;
            je["b"] = round6(ev.b);
            ojson comps = ojson::array();
            for (const auto& comp : ev.components) {
                ojson jc = ojson::array();
                for (int m : comp) jc.push_back(m + 1);
                comps.push_back(std::move(jc));
            }
            je["components"] = std::move(comps);
            events.push_back(std::move(je));
        }
        graph["merge_events"] = std::move(events);
        doc["graph"] = std::move(graph);
    }
    return doc.dump(2);
}

std::string report_text(const AnalysisResult& result) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    size_t n = result.config.size();
    os << "skelink " << kToolVersion << " analysis: " << n << " object(s)\n";
    os << "\nobjects:\n";
    for (size_t i = 0; i < n; ++i) {
        os << "  [" << i + 1 << "] "
           << (result.config.names[i].empty() ? "(unnamed)" : result.config.names[i])
           << "  area=" << result.volumes.object_volume[i]
           << " (shoelace " << result.volumes.object_shoelace[i] << ")"
           << "  strata=" << result.skeletons[i].strata.size()
           << " fans=" << result.skeletons[i].fans.size() << "\n";
    }
    os << "\nnonsingularity: " << (result.nonsingularity.pass() ? "pass" : "FAIL") << " ("
       << result.nonsingularity.failures.size() << " failing sides of "
       << result.nonsingularity.checked << ")\n";
    os << "\nvolumes (skeletal):\n  i  target     vol_omega        vol_n        vol_r\n";
    for (const VolumeRow& row : result.volumes.rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  %-2d %-6s %12.6g %12.6g %12.6g\n", row.object + 1,
                      target_name(row.kind, row.target).c_str(), row.vol_omega, row.vol_n,
                      row.vol_r);
        os << buf;
    }
    if (result.has_oracle) {
        os << "\nvolumes (oracle @" << result.params.oracle_resolution
           << "): max relative disagreement " << result.oracle_max_rel_disagreement << "\n";
    }
    os << "\ncloseness c_ij:\n";
    for (int i = 0; i < result.closeness_table.n; ++i) {
        os << "  ";
        for (int j = 0; j < result.closeness_table.n; ++j)
            os << round6(result.closeness_table.c[i][j]) << (j + 1 < result.closeness_table.n ? " " : "");
        os << "\n";
    }
    os << "\nsignificance s: ";
    for (double s : result.significance_vector.s) os << round6(s) << " ";
    os << "\n";
    if (result.weights_ok) {
        os << "\nproximity weights (lambda=" << round6(result.weights.lambda) << "): ";
        for (double w : result.weights.w) os << round6(w) << " ";
        os << "\n";
        if (!result.weights_vvol.empty()) {
            os << "renormalized (v_vol): ";
            for (double w : result.weights_vvol) os << round6(w) << " ";
            os << "\n";
        }
        if (!result.weights_vlk.empty()) {
            os << "renormalized (v_lk): ";
            for (double w : result.weights_vlk) os << round6(w) << " ";
            os << "\n";
        }
    } else {
        os << "\nproximity weights: unavailable (" << result.weights_error << ")\n";
    }
    os << "\ntiered graph: " << result.graph.vertex_height.size() << " vertices, "
       << result.graph.edges.size() << " edges\n";
    for (const MergeEvent& ev : result.merges) {
        os << "  merge at b=" << round6(ev.b) << ": ";
        for (const auto& comp : ev.components) {
            os << "{";
            for (size_t k = 0; k < comp.size(); ++k) os << (k ? "," : "") << comp[k] + 1;
            os << "} ";
        }
        os << "\n";
    }
    return os.str();
}

namespace {

ojson point_json(const Vec2& p) { return ojson::array({p.x, p.y}); }

ojson polyline_json(const Polyline& pl) {
    ojson out = ojson::array();
    for (const Vec2& p : pl) out.push_back(point_json(p));
    return out;
}

Polyline polyline_from(const ojson& j) {
    Polyline out;
    for (const auto& p : j) out.push_back({p[0].get<double>(), p[1].get<double>()});
    return out;
}

std::string region_key_string(const RegionKey& key) {
    return std::to_string(key.object + 1) + ":" + target_name(key.kind, key.target);
}

RegionKey region_key_parse(const std::string& s) {
    RegionKey key;
    size_t colon = s.find(':');
    key.object = std::stoi(s.substr(0, colon)) - 1;
    std::string t = s.substr(colon + 1);
    if (t == "inf") {
        key.kind = LinkTarget::Infinity;
        key.target = -1;
    } else if (t == "self") {
        key.kind = LinkTarget::SelfLink;
        key.target = key.object;
    } else {
        key.kind = LinkTarget::Object;
        key.target = std::stoi(t) - 1;
    }
    return key;
}

}  // namespace

StructureData structure_from_result(const AnalysisResult& result) {
    StructureData data;
    for (const Contour& c : result.config.objects) data.objects.push_back(c.vertices);
    data.bounding = result.bounding.boundary;
    for (const SkeletalStructure& sk : result.skeletons)
        for (const Stratum& st : sk.strata) {
            Polyline pl;
            for (const SkeletalSample& s : st.samples) pl.push_back(s.x);
            data.skeleton.push_back(std::move(pl));
        }
    for (const AxisStratum& st : result.axis.strata) data.axis.push_back(st.polyline);
    data.regions = result.regions;

    for (size_t oi = 0; oi < result.skeletons.size(); ++oi) {
        const SkeletalStructure& sk = result.skeletons[oi];
        const ObjectLinks& links = result.assignment.objects[oi];
        for (size_t si = 0; si < sk.strata.size(); ++si) {
            for (int side = 0; side < 2; ++side) {
                StructureData::FlowChain chain;
                chain.object = (int)oi;
                for (size_t k = 0; k < sk.strata[si].samples.size(); ++k) {
                    const SideRecord& rec = sk.strata[si].samples[k].side[side];
                    if (!rec.valid) continue;
                    chain.x.push_back(sk.strata[si].samples[k].x);
                    chain.u.push_back(rec.u);
                    chain.r.push_back(rec.r);
                    chain.ell.push_back(links.strata[si].sides[k][side].ell);
                }
                if (!chain.x.empty()) data.flow_chains.push_back(std::move(chain));
            }
        }
        for (size_t fi = 0; fi < sk.fans.size(); ++fi) {
            const Fan& fan = sk.fans[fi];
            StructureData::FlowFan ff;
            ff.object = (int)oi;
            ff.center = fan.center;
            ff.r = fan.r;
            for (const FanDirLink& d : links.fans[fi].dirs) {
                ff.theta.push_back(d.theta);
                ff.ell.push_back(d.link.ell);
            }
            if (!ff.theta.empty()) data.flow_fans.push_back(std::move(ff));
        }
    }
    return data;
}

std::string structure_json(const AnalysisResult& result) {
    StructureData data = structure_from_result(result);
    ojson doc;
    doc["schema"] = "skelink-structure-1";
    ojson objs = ojson::array();
    for (const Polygon& poly : data.objects) objs.push_back(polyline_json(poly));
    doc["objects"] = std::move(objs);
    doc["bounding"] = polyline_json(data.bounding);
    ojson skel = ojson::array();
    for (const Polyline& pl : data.skeleton) skel.push_back(polyline_json(pl));
    doc["skeleton"] = std::move(skel);
    ojson axis = ojson::array();
    for (const Polyline& pl : data.axis) axis.push_back(polyline_json(pl));
    doc["axis"] = std::move(axis);

    ojson chains = ojson::array();
    for (const auto& chain : data.flow_chains) {
        ojson jc;
        jc["object"] = chain.object + 1;
        jc["x"] = polyline_json(chain.x);
        jc["u"] = polyline_json(chain.u);
        jc["r"] = chain.r;
        jc["ell"] = chain.ell;
        chains.push_back(std::move(jc));
    }
    doc["flow_chains"] = std::move(chains);
    ojson fans = ojson::array();
    for (const auto& fan : data.flow_fans) {
        ojson jf;
        jf["object"] = fan.object + 1;
        jf["center"] = point_json(fan.center);
        jf["r"] = fan.r;
        jf["theta"] = fan.theta;
        jf["ell"] = fan.ell;
        fans.push_back(std::move(jf));
    }
    doc["flow_fans"] = std::move(fans);

    ojson regions;
    ojson internal = ojson::object();
    for (const auto& [key, polys] : data.regions.internal_pieces) {
        ojson arr = ojson::array();
        for (const Polygon& p : polys) arr.push_back(polyline_json(p));
        internal[region_key_string(key)] = std::move(arr);
    }
    regions["internal"] = std::move(internal);
    ojson external = ojson::object();
    for (const auto& [key, polys] : data.regions.external_pieces) {
        ojson arr = ojson::array();
        for (const Polygon& p : polys) arr.push_back(polyline_json(p));
        external[region_key_string(key)] = std::move(arr);
    }
    regions["external"] = std::move(external);
    ojson bpieces = ojson::object();
    for (const auto& [key, pls] : data.regions.boundary_pieces) {
        ojson arr = ojson::array();
        for (const Polyline& p : pls) arr.push_back(polyline_json(p));
        bpieces[region_key_string(key)] = std::move(arr);
    }
    regions["boundary"] = std::move(bpieces);
    doc["regions"] = std::move(regions);
    return doc.dump();
}

StructureData parse_structure_json(const std::string& text) {
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed structure document: ") + e.what());
    }
    if (doc.value("schema", std::string{}) != "skelink-structure-1")
        throw InputError("not a skelink structure document");
    StructureData data;
    for (const auto& j : doc["objects"]) data.objects.push_back(polyline_from(j));
    data.bounding = polyline_from(doc["bounding"]);
    for (const auto& j : doc["skeleton"]) data.skeleton.push_back(polyline_from(j));
    for (const auto& j : doc["axis"]) data.axis.push_back(polyline_from(j));
    for (const auto& j : doc["flow_chains"]) {
        StructureData::FlowChain chain;
        chain.object = j["object"].get<int>() - 1;
        chain.x = polyline_from(j["x"]);
        chain.u = polyline_from(j["u"]);
        chain.r = j["r"].get<std::vector<double>>();
        chain.ell = j["ell"].get<std::vector<double>>();
        data.flow_chains.push_back(std::move(chain));
    }
    for (const auto& j : doc["flow_fans"]) {
        StructureData::FlowFan fan;
        fan.object = j["object"].get<int>() - 1;
        fan.center = {j["center"][0].get<double>(), j["center"][1].get<double>()};
        fan.r = j["r"].get<double>();
        fan.theta = j["theta"].get<std::vector<double>>();
        fan.ell = j["ell"].get<std::vector<double>>();
        data.flow_fans.push_back(std::move(fan));
    }
    if (doc.contains("regions")) {
        for (auto& [k, arr] : doc["regions"]["internal"].items()) {
            RegionKey key = region_key_parse(k);
            for (const auto& jp : arr) data.regions.internal_pieces[key].push_back(polyline_from(jp));
        }
        for (auto& [k, arr] : doc["regions"]["external"].items()) {
            RegionKey key = region_key_parse(k);
            for (const auto& jp : arr) data.regions.external_pieces[key].push_back(polyline_from(jp));
        }
        for (auto& [k, arr] : doc["regions"]["boundary"].items()) {
            RegionKey key = region_key_parse(k);
            for (const auto& jp : arr) data.regions.boundary_pieces[key].push_back(polyline_from(jp));
        }
    }
    return data;
}

}  // namespace skelink
