#include "soclens/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "soclens/colorspace.hpp"
#include "soclens/errors.hpp"

namespace soclens {

namespace {

std::string num(double value, int precision = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

// Section offsets within a quad of size s, by ImpliedKind order:
// Level top-left, Reflect top-right, Rise bottom-left, Fall bottom-right.
struct SectionGeom {
    double rect_x, rect_y;     // top-left of the section rect
    double corner_x, corner_y; // outer corner of the quad
};

SectionGeom section_geom(ImpliedKind kind, double s) {
    double h = s / 2.0;
    switch (kind) {
    case ImpliedKind::Level: return {-h, -h, -h, -h};
    case ImpliedKind::Reflect: return {0.0, -h, h, -h};
    case ImpliedKind::Rise: return {-h, 0.0, -h, h};
    case ImpliedKind::Fall: return {0.0, 0.0, h, h};
    }
    return {};
}

} // namespace

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

Layout make_layout(size_t node_count, const RenderOptions& options) {
    Layout layout;
    layout.centre_x = options.canvas / 2.0;
    layout.centre_y = options.canvas / 2.0;
    layout.radius = options.canvas / 2.0 - options.canvas / 8.0;
    if (node_count == 0) {
        layout.quad_size = 0.0;
        return layout;
    }
    double spacing =
        2.0 * M_PI * layout.radius / static_cast<double>(node_count);
    layout.quad_size = std::clamp(0.5 * spacing, 10.0, options.canvas / 22.0);
    layout.node_positions.reserve(node_count);
    for (size_t k = 0; k < node_count; ++k) {
        Layout::Pos p;
        p.angle = -M_PI / 2.0 + 2.0 * M_PI * static_cast<double>(k) /
                                    static_cast<double>(node_count);
        p.x = layout.centre_x + layout.radius * std::cos(p.angle);
        p.y = layout.centre_y + layout.radius * std::sin(p.angle);
        layout.node_positions.push_back(p);
    }
    return layout;
}

std::string render_node(const NodeStats& stats, const Layout& layout,
                        size_t node_index, const RenderOptions& options) {
    const auto& pos = layout.node_positions.at(node_index);
    double s = layout.quad_size;
    std::string out;
    out += "<g class=\"node\" transform=\"translate(" + num(pos.x) + "," +
           num(pos.y) + ")\">\n";
    for (ImpliedKind kind : kAllKinds) {
        auto idx = static_cast<size_t>(kind);
        SectionGeom geom = section_geom(kind, s);
        Rgb8 fill =
            map2d(stats.ex_window[idx], stats.ex_global[idx], options.gamma);
        out += "  <rect class=\"sec\" x=\"" + num(geom.rect_x) + "\" y=\"" +
               num(geom.rect_y) + "\" width=\"" + num(s / 2.0) +
               "\" height=\"" + num(s / 2.0) + "\" fill=\"" + fill.hex() +
               "\" stroke=\"#888888\" stroke-width=\"0.5\">";
        out += "<title>" + xml_escape(stats.id.name) + " " + to_string(kind) +
               ": window=" + num(stats.ex_window[idx], 4) +
               " global=" + num(stats.ex_global[idx], 4) + "</title>";
        out += "</rect>\n";
    }
    // Label sits radially outward from the quad; anchor flips with the side
    // of the circle so text always runs away from the centre.
    double ux = std::cos(pos.angle);
    double uy = std::sin(pos.angle);
    double lx = ux * (s * 0.8 + 6.0);
    double ly = uy * (s * 0.8 + 6.0);
    const char* anchor =
        ux > 0.1 ? "start" : (ux < -0.1 ? "end" : "middle");
    out += "  <text class=\"label\" x=\"" + num(lx) + "\" y=\"" + num(ly) +
           "\" font-size=\"" + num(options.text_size) + "\" text-anchor=\"" +
           std::string(anchor) + "\" dominant-baseline=\"middle\">" +
           xml_escape(stats.id.name) + "</text>\n";
    out += "</g>\n";
    return out;
}

std::string render_edge(const Edge& edge, const Layout& layout,
                        const RenderOptions& options) {
    const auto& src_pos = layout.node_positions.at(edge.src.measurement);
    const auto& dst_pos = layout.node_positions.at(edge.dst.measurement);
    double s = layout.quad_size;

    SectionGeom src_geom = section_geom(edge.src.kind, s);
    SectionGeom dst_geom = section_geom(edge.dst.kind, s);

    // Dot direction: the corner bisector rotated by up to 30 degrees in
    // proportion to delta / delta_max.
    double inv = std::sqrt(2.0) / 2.0;
    double bx = src_geom.corner_x > 0 ? inv : -inv;
    double by = src_geom.corner_y > 0 ? inv : -inv;
    double frac = options.delta_max > 0
                      ? static_cast<double>(edge.delta) /
                            static_cast<double>(options.delta_max)
                      : 0.0;
    double rot = std::clamp(frac, -1.0, 1.0) * M_PI / 6.0;
    double dx = bx * std::cos(rot) - by * std::sin(rot);
    double dy = bx * std::sin(rot) + by * std::cos(rot);

    double dot_x = src_pos.x + src_geom.corner_x + dx * s * 0.45;
    double dot_y = src_pos.y + src_geom.corner_y + dy * s * 0.45;
    double end_x = dst_pos.x + dst_geom.rect_x + s / 4.0;
    double end_y = dst_pos.y + dst_geom.rect_y + s / 4.0;

    Rgb8 stroke = map2d(edge.dep, edge.cov, options.gamma);
    double width = options.edge_width_base * edge.cov;
    double opacity = 0.25 + 0.75 * edge.dep;
    double dot_r =
        options.dot_radius_base * (0.5 + 0.5 * edge.dep * edge.cov);

    std::string out;
    out += "<g class=\"edge\">";
    out += "<title>delta=" + std::to_string(edge.delta) +
           " dep=" + num(edge.dep, 4) + " cov=" + num(edge.cov, 4) +
           " cond_ex=" +
           (edge.cond_ex ? num(*edge.cond_ex, 4) : std::string("undefined")) +
           "</title>\n";
    out += "  <line x1=\"" + num(dot_x) + "\" y1=\"" + num(dot_y) +
           "\" x2=\"" + num(end_x) + "\" y2=\"" + num(end_y) + "\" stroke=\"" +
           stroke.hex() + "\" stroke-width=\"" + num(width, 3) +
           "\" stroke-opacity=\"" + num(opacity, 3) + "\"/>\n";
    out += "  <circle cx=\"" + num(dot_x) + "\" cy=\"" + num(dot_y) +
           "\" r=\"" + num(dot_r, 3) + "\" fill=\"#000000\"/>\n";
    out += "</g>\n";
    return out;
}

std::string render_frame(const BehaviourGraph& graph, const Layout& layout,
                         const RenderOptions& options) {
    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "viewBox=\"0 0 " +
           num(options.canvas, 0) + " " + num(options.canvas, 0) + "\">\n";
    svg += "<rect class=\"bg\" x=\"0\" y=\"0\" width=\"" +
           num(options.canvas, 0) + "\" height=\"" + num(options.canvas, 0) +
           "\" fill=\"#ffffff\"/>\n";
    svg += "<text class=\"caption\" x=\"16\" y=\"28\" font-size=\"" +
           num(options.text_size * 1.6) + "\">window [" +
           std::to_string(graph.window.u) + ", " +
           std::to_string(graph.window.v) + ")</text>\n";
    svg += "<g class=\"edges\">\n";
    for (const auto& edge : graph.edges)
        svg += render_edge(edge, layout, options);
    svg += "</g>\n<g class=\"nodes\">\n";
    for (size_t k = 0; k < graph.nodes.size(); ++k)
        svg += render_node(graph.nodes[k], layout, k, options);
    svg += "</g>\n</svg>\n";
    return svg;
}

std::vector<std::filesystem::path>
render_sweep(std::span<const BehaviourGraph> graphs,
             const std::filesystem::path& out_dir,
             const RenderOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir.string() +
                      ": " + ec.message());

    auto write_file = [&](const std::filesystem::path& path,
                          const std::string& body) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << body;
        if (!out) throw IoError("write failed for " + path.string());
    };

    std::vector<std::filesystem::path> written;
    Layout layout = make_layout(
        graphs.empty() ? 0 : graphs.front().nodes.size(), options);

    std::string index;
    index += "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
             "<title>behaviour graphs</title></head>\n<body>\n"
             "<h1>Behaviour graph frames</h1>\n<ol>\n";
    for (size_t k = 0; k < graphs.size(); ++k) {
        const auto& g = graphs[k];
        std::string name = "frame_" + std::to_string(k) + "_" +
                           std::to_string(g.window.u) + "_" +
                           std::to_string(g.window.v) + ".svg";
        write_file(out_dir / name, render_frame(g, layout, options));
        written.push_back(out_dir / name);
        index += "<li><a href=\"" + name + "\">window [" +
                 std::to_string(g.window.u) + ", " +
                 std::to_string(g.window.v) + ")</a>, " +
                 std::to_string(g.edges.size()) + " edges<br>"
                 "<object data=\"" +
                 name + "\" type=\"image/svg+xml\" width=\"480\"></object>"
                 "</li>\n";
    }
    index += "</ol>\n</body></html>\n";
    write_file(out_dir / "index.html", index);
    written.push_back(out_dir / "index.html");
    return written;
}

} // namespace soclens
