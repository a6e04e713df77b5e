#include "svg.hpp"

#include <cmath>
#include <sstream>

#include "flow.hpp"

namespace skelink {

namespace {

class SvgCanvas {
public:
    SvgCanvas(const Box& world, double pixels = 900.0) {
        double extent = std::max({world.width(), world.height(), 1e-9});
        scale_ = pixels / extent;
        pad_ = 0.03 * extent;
        lo_ = world.lo;
        lo_.x -= pad_;
        lo_.y -= pad_;
        width_ = (world.width() + 2 * pad_) * scale_;
        height_ = (world.height() + 2 * pad_) * scale_;
        hi_y_ = world.hi.y + pad_;
    }

    double sx(double x) const { return (x - lo_.x) * scale_; }
    double sy(double y) const { return (hi_y_ - y) * scale_; }

    void open(std::ostringstream& os) const {
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)width_
           << "\" height=\"" << (int)height_ << "\" viewBox=\"0 0 " << (int)width_ << " "
           << (int)height_ << "\">\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }

    void path(std::ostringstream& os, const Polyline& pl, bool closed, const std::string& stroke,
              double width, const std::string& fill, const std::string& extra = "") const {
        if (pl.size() < 2) return;
        os << "<path d=\"M" << sx(pl[0].x) << " " << sy(pl[0].y);
        for (size_t i = 1; i < pl.size(); ++i) os << " L" << sx(pl[i].x) << " " << sy(pl[i].y);
        if (closed) os << " Z";
        os << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\" fill=\"" << fill
           << "\"" << (extra.empty() ? "" : " " + extra) << "/>\n";
    }

private:
    Vec2 lo_;
    double hi_y_ = 0.0;
    double scale_ = 1.0, pad_ = 0.0, width_ = 0.0, height_ = 0.0;
};

Box world_of(const StructureData& data) {
    Box world;
    for (const Polygon& poly : data.objects)
        for (const Vec2& p : poly) world.expand(p);
    for (const Vec2& p : data.bounding) world.expand(p);
    for (const auto& pl : data.axis)
        for (const Vec2& p : pl) world.expand(p);
    return world;
}

std::string hue_color(int index, double lightness) {
    double hue = std::fmod(47.0 + 67.0 * index, 360.0);
    std::ostringstream os;
    os << "hsl(" << (int)hue << ", 65%, " << (int)(lightness * 100) << "%)";
    return os.str();
}

int pair_index(const RegionKey& key) {
    if (key.kind == LinkTarget::Object) {
        int a = std::min(key.object, key.target);
        int b = std::max(key.object, key.target);
        return a * 97 + b;
    }
    if (key.kind == LinkTarget::SelfLink) return 7919 + key.object;
    return -1;
}

}  // namespace

std::string svg_overlay(const StructureData& data) {
    Box world = world_of(data);
    SvgCanvas canvas(world);
    std::ostringstream os;
    canvas.open(os);
    if (data.bounding.size() >= 3)
        canvas.path(os, data.bounding, true, "#888", 1.5, "none", "stroke-dasharray=\"6 4\"");
    for (const Polygon& poly : data.objects)
        canvas.path(os, poly, true, "#333", 2.0, "#d7e3f4");
    for (const Polyline& pl : data.skeleton) canvas.path(os, pl, false, "#b03030", 1.6, "none");
    for (const Polyline& pl : data.axis) canvas.path(os, pl, false, "#2060b0", 1.6, "none");
    os << "</svg>\n";
    return os.str();
}

std::string svg_regions(const StructureData& data) {
    Box world = world_of(data);
    SvgCanvas canvas(world);
    std::ostringstream os;
    canvas.open(os);
    if (data.bounding.size() >= 3)
        canvas.path(os, data.bounding, true, "#888", 1.5, "none", "stroke-dasharray=\"6 4\"");
    for (const auto& [key, polys] : data.regions.external_pieces) {
        int idx = pair_index(key);
        std::string fill = idx < 0 ? "#eeeeee" : hue_color(idx, 0.85);
        for (const Polygon& poly : polys) canvas.path(os, poly, true, "none", 0.0, fill);
    }
    for (const auto& [key, polys] : data.regions.internal_pieces) {
        int idx = pair_index(key);
        std::string fill = idx < 0 ? "#ffffff" : hue_color(idx, 0.55);
        for (const Polygon& poly : polys) canvas.path(os, poly, true, "none", 0.0, fill);
    }
    for (const Polygon& poly : data.objects) canvas.path(os, poly, true, "#333", 2.0, "none");
    for (const Polyline& pl : data.axis) canvas.path(os, pl, false, "#2060b0", 1.2, "none");
    os << "</svg>\n";
    return os.str();
}

std::string svg_level_sets(const StructureData& data, const std::vector<double>& times) {
    Box world = world_of(data);
    SvgCanvas canvas(world);
    std::ostringstream os;
    canvas.open(os);
    if (data.bounding.size() >= 3)
        canvas.path(os, data.bounding, true, "#888", 1.5, "none", "stroke-dasharray=\"6 4\"");
    for (const Polygon& poly : data.objects) canvas.path(os, poly, true, "#333", 1.2, "#f2f2f2");
    int ti = 0;
    for (double t : times) {
        std::string color = hue_color(3 * ti++, 0.45);
        for (const auto& chain : data.flow_chains) {
            Polyline pl;
            for (size_t k = 0; k < chain.x.size(); ++k)
                pl.push_back(chain.x[k] + chain.u[k] * chi(chain.r[k], chain.ell[k], t));
            canvas.path(os, pl, false, color, 1.2, "none");
        }
        for (const auto& fan : data.flow_fans) {
            Polyline pl;
            for (size_t k = 0; k < fan.theta.size(); ++k)
                pl.push_back(fan.center + dir_of(fan.theta[k]) * chi(fan.r, fan.ell[k], t));
            canvas.path(os, pl, false, color, 1.2, "none");
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_tiered_graph(const TieredGraph& graph) {
    double w = 720, h = 480, margin = 60;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)w << "\" height=\""
       << (int)h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    double smax = 1e-9, cmax = 1e-9;
    for (double s : graph.vertex_height) smax = std::max(smax, s);
    for (const auto& e : graph.edges) cmax = std::max(cmax, e.height);
    auto X = [&](double s) { return margin + (w - 2 * margin) * (s / (1.15 * smax)); };
    auto Y = [&](double c) { return h - margin - (h - 2 * margin) * (c / (1.15 * cmax)); };

    os << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
       << "\" y2=\"" << h - margin << "\" stroke=\"#333\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << margin
       << "\" y2=\"" << margin << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << w - margin << "\" y=\"" << h - margin + 30
       << "\" font-size=\"14\" text-anchor=\"end\">s</text>\n";
    os << "<text x=\"" << margin - 30 << "\" y=\"" << margin
       << "\" font-size=\"14\">c</text>\n";

    for (const auto& e : graph.edges) {
        double x1 = X(graph.vertex_height[e.i]);
        double x2 = X(graph.vertex_height[e.j]);
        double y = Y(e.height);
        os << "<line x1=\"" << x1 << "\" y1=\"" << h - margin << "\" x2=\"" << x1 << "\" y2=\""
           << y << "\" stroke=\"#777\" stroke-dasharray=\"3 3\"/>\n";
        os << "<line x1=\"" << x2 << "\" y1=\"" << h - margin << "\" x2=\"" << x2 << "\" y2=\""
           << y << "\" stroke=\"#777\" stroke-dasharray=\"3 3\"/>\n";
        os << "<line x1=\"" << x1 << "\" y1=\"" << y << "\" x2=\"" << x2 << "\" y2=\"" << y
           << "\" stroke=\"#2060b0\" stroke-width=\"1.6\"/>\n";
    }
    for (size_t i = 0; i < graph.vertex_height.size(); ++i) {
        double x = X(graph.vertex_height[i]);
        os << "<circle cx=\"" << x << "\" cy=\"" << h - margin
           << "\" r=\"5\" fill=\"#b03030\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << h - margin + 22
           << "\" font-size=\"13\" text-anchor=\"middle\">" << i + 1 << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace skelink
