#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "soclens/graph.hpp"

namespace soclens {

struct RenderOptions {
    double canvas = 1200.0;    // square canvas, drawing units
    double text_size = 10.0;   // label font size
    double gamma = 1.0;        // colourspace exponent
    double edge_width_base = 5.0;
    double dot_radius_base = 5.0;
    int64_t delta_max = 16;    // normalizes the shift-to-dot-angle encoding
};

/// Circular arrangement of the measurement quads. Angles are evenly spaced
/// in node order, starting at the top, and depend only on the node count,
/// so every frame of a sweep shares the same geometry.
struct Layout {
    struct Pos {
        double angle = 0.0;
        double x = 0.0;
        double y = 0.0;
    };
    double radius = 0.0;
    double centre_x = 0.0;
    double centre_y = 0.0;
    double quad_size = 0.0;
    std::vector<Pos> node_positions;
};

Layout make_layout(size_t node_count, const RenderOptions& options);

/// One measurement quad: 2x2 section rectangles (Level top-left, Reflect
/// top-right, Rise bottom-left, Fall bottom-right) coloured by
/// map2d(ex_window, ex_global), the name as an adjacent label, and the
/// numeric values as hover titles.
std::string render_node(const NodeStats& stats, const Layout& layout,
                        size_t node_index, const RenderOptions& options);

/// One significant link: a black dot just outside the src section corner
/// (rotated off the corner bisector in proportion to delta), a line into
/// the centre of the dst section, stroke weight and opacity scaled by cov
/// and dep.
std::string render_edge(const Edge& edge, const Layout& layout,
                        const RenderOptions& options);

/// A standalone SVG document for one window; edges are layered beneath the
/// nodes and the window bounds appear as a caption. Byte-deterministic.
std::string render_frame(const BehaviourGraph& graph, const Layout& layout,
                         const RenderOptions& options);

/// Write one `frame_<k>_<u>_<v>.svg` per graph plus an `index.html` that
/// lists the frames in order. Returns the written file paths (index last).
std::vector<std::filesystem::path>
render_sweep(std::span<const BehaviourGraph> graphs,
             const std::filesystem::path& out_dir,
             const RenderOptions& options);

/// Escape &, <, >, ", ' for use in XML text and attribute values.
std::string xml_escape(std::string_view text);

} // namespace soclens
