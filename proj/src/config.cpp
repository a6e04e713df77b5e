#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "util.hpp"

namespace skelink {

using nlohmann::json;

bool BoundingRegion::point_inside(const Vec2& p) const {
    if (kind == BoundingKind::Threshold) return working_box.contains(p);
    return point_in_polygon(p, boundary);
}

static std::string fmt_pt(const Vec2& p) {
    std::ostringstream os;
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

// Overlap includes crossing boundaries and full containment of one closure in the other.
static bool objects_overlap(const Polygon& a, const Polygon& b, Vec2& witness) {
    size_t na = a.size(), nb = b.size();
    for (size_t i = 0; i < na; ++i)
        for (size_t j = 0; j < nb; ++j)
            if (segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])) {
                witness = a[i];
                return true;
            }
    if (point_in_polygon(a[0], b)) { witness = a[0]; return true; }
    if (point_in_polygon(b[0], a)) { witness = b[0]; return true; }
    return false;
}

static Contour contour_from_json(const json& obj, size_t index) {
    if (!obj.contains("vertices") || !obj["vertices"].is_array())
        throw InputError("object " + std::to_string(index + 1) + ": missing vertices array");
    Polygon poly;
    for (const auto& v : obj["vertices"]) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw InputError("object " + std::to_string(index + 1) + ": vertex must be [x, y]");
        double x = v[0].get<double>();
        double y = v[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y))
            throw InputError("object " + std::to_string(index + 1) + ": non-finite coordinate");
        poly.push_back({x, y});
    }
    if (poly.size() >= 2 && dist(poly.front(), poly.back()) == 0.0) poly.pop_back();
    if (poly.size() < 3)
        throw InputError("object " + std::to_string(index + 1) + ": needs at least 3 vertices");
    for (size_t i = 0; i < poly.size(); ++i)
        if (dist(poly[i], poly[(i + 1) % poly.size()]) == 0.0)
            throw InputError("object " + std::to_string(index + 1) +
                             ": duplicate consecutive vertex at " + fmt_pt(poly[i]));
    if (!polygon_is_simple(poly))
        throw InputError("object " + std::to_string(index + 1) + ": contour self-intersects");
    if (!polygon_is_ccw(poly)) std::reverse(poly.begin(), poly.end());
    return Contour{std::move(poly)};
}

Configuration parse_configuration(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed document: ") + e.what());
    }
    if (!doc.contains("objects") || !doc["objects"].is_array() || doc["objects"].empty())
        throw InputError("document must contain a non-empty objects array");

    Configuration config;
    size_t idx = 0;
    for (const auto& obj : doc["objects"]) {
        config.objects.push_back(contour_from_json(obj, idx));
        config.names.push_back(obj.value("name", std::string{}));
        ++idx;
    }
    for (size_t i = 0; i < config.size(); ++i)
        for (size_t j = i + 1; j < config.size(); ++j) {
            Vec2 w;
            if (objects_overlap(config.objects[i].vertices, config.objects[j].vertices, w))
                throw InputError("objects overlap: objects " + std::to_string(i + 1) + " and " +
                                 std::to_string(j + 1) + " near " + fmt_pt(w));
        }
    return config;
}

std::string serialize_configuration(const Configuration& config) {
    json doc;
    doc["objects"] = json::array();
    for (size_t i = 0; i < config.size(); ++i) {
        json obj;
        if (!config.names[i].empty()) obj["name"] = config.names[i];
        json verts = json::array();
        for (const Vec2& p : config.objects[i].vertices) verts.push_back({p.x, p.y});
        obj["vertices"] = std::move(verts);
        doc["objects"].push_back(std::move(obj));
    }
    return doc.dump();
}

bool parse_bounding_spec(const std::string& text, BoundingSpec& out) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed document: ") + e.what());
    }
    if (!doc.contains("bounding")) return false;
    const json& b = doc["bounding"];
    std::string kind = b.value("kind", std::string{});
    if (kind == "box") {
        out.kind = BoundingKind::Box;
        if (!b.contains("box") || !b["box"].is_array() || b["box"].size() != 2)
            throw InputError("bounding box requires \"box\": [[x0,y0],[x1,y1]]");
        out.box_lo = {b["box"][0][0].get<double>(), b["box"][0][1].get<double>()};
        out.box_hi = {b["box"][1][0].get<double>(), b["box"][1][1].get<double>()};
    } else if (kind == "hull") {
        out.kind = BoundingKind::Hull;
        out.margin = b.value("margin", 0.0);
        if (out.margin < 0.0) throw InputError("hull margin must be >= 0");
    } else if (kind == "threshold") {
        out.kind = BoundingKind::Threshold;
        out.tau = b.value("tau", 0.0);
        if (out.tau <= 0.0) throw InputError("threshold tau must be > 0");
    } else {
        throw InputError("bounding kind must be box, hull, or threshold");
    }
    return true;
}

BoundingRegion build_bounding_region(const Configuration& config, const BoundingSpec& spec) {
    BoundingRegion region;
    region.kind = spec.kind;

    Box objects_box;
    for (const Contour& c : config.objects)
        for (const Vec2& p : c.vertices) objects_box.expand(p);

    switch (spec.kind) {
        case BoundingKind::Box: {
            if (spec.box_hi.x <= spec.box_lo.x || spec.box_hi.y <= spec.box_lo.y)
                throw InputError("bounding box is empty");
            region.boundary = {spec.box_lo,
                               {spec.box_hi.x, spec.box_lo.y},
                               spec.box_hi,
                               {spec.box_lo.x, spec.box_hi.y}};
            for (const Contour& c : config.objects)
                for (const Vec2& p : c.vertices)
                    if (!point_in_polygon(p, region.boundary))
                        throw InputError("box does not contain configuration (vertex " +
                                         fmt_pt(p) + " outside)");
            break;
        }
        case BoundingKind::Hull: {
            std::vector<Vec2> all;
            for (const Contour& c : config.objects)
                all.insert(all.end(), c.vertices.begin(), c.vertices.end());
            Polygon hull = convex_hull(all);
            if (hull.size() < 3) throw InputError("configuration is degenerate (collinear)");
            region.boundary =
                spec.margin > 0.0 ? dilate_convex_polygon(hull, spec.margin) : hull;
            break;
        }
        case BoundingKind::Threshold: {
            if (spec.tau <= 0.0) throw InputError("threshold tau must be > 0");
            region.tau = spec.tau;
            break;
        }
    }

    region.working_box = objects_box;
    if (region.kind == BoundingKind::Threshold)
        region.working_box.dilate(2.0 * spec.tau + 1e-9 * objects_box.diameter());
    else {
        for (const Vec2& p : region.boundary) region.working_box.expand(p);
        region.working_box.dilate(1e-9 * region.working_box.diameter());
    }
    return region;
}

std::vector<Diagnostic> validate_configuration(const Configuration& config,
                                               double sampling_resolution) {
    std::vector<Diagnostic> out;
    auto push = [&](Diagnostic::Severity s, const std::string& code, const std::string& msg,
                    const Vec2* w = nullptr) {
        Diagnostic d{s, code, msg, {}, false};
        if (w) { d.witness = *w; d.has_witness = true; }
        out.push_back(std::move(d));
    };

    double diameter = 0.0;
    {
        Box b;
        for (const Contour& c : config.objects)
            for (const Vec2& p : c.vertices) b.expand(p);
        diameter = b.diameter();
    }
    if (sampling_resolution <= 0.0) sampling_resolution = diameter * 1e-6;

    for (size_t i = 0; i < config.size(); ++i) {
        const Polygon& poly = config.objects[i].vertices;
        size_t n = poly.size();
        double perim = polygon_perimeter(poly);
        int reflex = 0;
        for (size_t k = 0; k < n; ++k) {
            const Vec2& a = poly[(k + n - 1) % n];
            const Vec2& b = poly[k];
            const Vec2& c = poly[(k + 1) % n];
            double e = dist(a, b);
            if (e == 0.0) {
                push(Diagnostic::Severity::Error, "duplicate-vertex",
                     "object " + std::to_string(i + 1) + " has a duplicate consecutive vertex",
                     &b);
                continue;
            }
            if (e < perim * 1e-6)
                push(Diagnostic::Severity::Warning, "short-edge",
                     "object " + std::to_string(i + 1) + " has an edge shorter than 1e-6 of its perimeter",
                     &b);
            if (cross(b - a, c - b) < 0.0) ++reflex;
        }
        if (n > 0 && reflex > (int)(n / 2))
            push(Diagnostic::Severity::Warning, "reflex-density",
                 "object " + std::to_string(i + 1) + " has reflex corners at more than half its vertices");
    }

    for (size_t i = 0; i < config.size(); ++i)
        for (size_t j = i + 1; j < config.size(); ++j) {
            double sep = polygon_boundary_distance(config.objects[i].vertices,
                                                   config.objects[j].vertices);
            if (sep < sampling_resolution) {
                std::ostringstream os;
                os << "separation below sampling resolution: objects " << (i + 1) << " and "
                   << (j + 1) << " are " << sep << " apart";
                push(Diagnostic::Severity::Warning, "near-tangent", os.str());
            }
        }
    return out;
}

}  // namespace skelink
