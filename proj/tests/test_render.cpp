#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracle.hpp"
#include "soclens/graph.hpp"
#include "soclens/render.hpp"

using namespace soclens;

namespace {

// Small well-formedness checker: tags balance, attributes stay quoted.
bool well_formed_xml(const std::string& doc) {
    std::vector<std::string> stack;
    size_t i = 0;
    while (i < doc.size()) {
        if (doc[i] != '<') {
            ++i;
            continue;
        }
        size_t close = i + 1;
        bool in_quote = false;
        while (close < doc.size() && (doc[close] != '>' || in_quote)) {
            if (doc[close] == '"') in_quote = !in_quote;
            ++close;
        }
        if (close == doc.size()) return false;
        std::string tag = doc.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.empty()) return false;
        if (tag.front() == '?' || tag.front() == '!') continue;
        if (tag.front() == '/') {
            if (stack.empty()) return false;
            std::string name = tag.substr(1);
            if (stack.back() != name) return false;
            stack.pop_back();
            continue;
        }
        bool self_closing = tag.back() == '/';
        std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
        size_t quotes = std::count(tag.begin(), tag.end(), '"');
        if (quotes % 2) return false;
        if (!self_closing) stack.push_back(name);
    }
    return stack.empty();
}

size_t count_substr(const std::string& text, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

std::vector<std::string> node_transforms(const std::string& svg) {
    std::vector<std::string> out;
    const std::string key = "transform=\"";
    for (size_t pos = svg.find(key); pos != std::string::npos;
         pos = svg.find(key, pos + key.size())) {
        size_t end = svg.find('"', pos + key.size());
        out.push_back(svg.substr(pos, end - pos + 1));
    }
    return out;
}

TraceSet demo_set() {
    TraceSet set;
    std::vector<int> ones(600, 1), zeros(600, 0);
    set.add("always.on", oracle::to_bintrace(ones));
    set.add("always.off", oracle::to_bintrace(zeros));
    auto base = oracle::random_trace(600, 0.3, 5);
    std::vector<int> delayed(600, 0);
    for (size_t t = 3; t < 600; ++t) delayed[t] = base[t - 3];
    set.add("req", oracle::to_bintrace(base));
    set.add("rsp<&>", oracle::to_bintrace(delayed)); // exercises escaping
    return set;
}

} // namespace

TEST_CASE("node fragments carry four sections and one label") {
    TraceSet set = demo_set();
    auto stats = node_stats(set, window_weights(0, 600, 2.0));
    Layout layout = make_layout(set.size(), RenderOptions{});
    std::string fragment = render_node(stats[0], layout, 0, RenderOptions{});
    CHECK(count_substr(fragment, "<rect class=\"sec\"") == 4);
    CHECK(count_substr(fragment, "<text") == 1);
    // always-on: Level section is the black corner of the colourspace
    CHECK(fragment.find("fill=\"#000000\"") != std::string::npos);

    std::string off = render_node(stats[1], layout, 1, RenderOptions{});
    CHECK(off.find("fill=\"#ffffff\"") != std::string::npos); // Level white
    CHECK(off.find("fill=\"#000000\"") != std::string::npos); // Reflect black
}

TEST_CASE("edge encoding extremes") {
    Layout layout = make_layout(3, RenderOptions{});
    Edge e;
    e.src = {0, ImpliedKind::Level};
    e.dst = {1, ImpliedKind::Rise};
    e.delta = 0;
    e.dep = 1.0;
    e.cov = 1.0;
    RenderOptions options;
    std::string svg = render_edge(e, layout, options);
    CHECK(svg.find("stroke=\"#000000\"") != std::string::npos);
    CHECK(svg.find("stroke-opacity=\"1.000\"") != std::string::npos);
    CHECK(svg.find("stroke-width=\"5.000\"") != std::string::npos);

    e.dep = 0.01;
    e.cov = 0.01;
    std::string faint = render_edge(e, layout, options);
    CHECK(faint.find("stroke-width=\"0.050\"") != std::string::npos);
    CHECK(faint.find("stroke-opacity=\"0.258\"") != std::string::npos);
}

TEST_CASE("frames are well-formed, layered and deterministic") {
    TraceSet set = demo_set();
    SweepParams params;
    params.window_length = 300;
    params.stride = 300;
    params.delta_max = 4;
    auto graphs = window_sweep(set, params);
    REQUIRE(!graphs.empty());
    RenderOptions options;
    options.delta_max = params.delta_max;
    Layout layout = make_layout(set.size(), options);
    std::string svg = render_frame(graphs[0], layout, options);

    CHECK(well_formed_xml(svg));
    CHECK(count_substr(svg, "<rect class=\"sec\"") == 4 * set.size());
    CHECK(count_substr(svg, "<g class=\"edge\">") == graphs[0].edges.size());
    CHECK(svg.find("window [0, 300)") != std::string::npos);
    CHECK(svg.find("rsp&lt;&amp;&gt;") != std::string::npos);
    CHECK(svg.find("<g class=\"edges\">") < svg.find("<g class=\"nodes\">"));
    CHECK(svg == render_frame(graphs[0], layout, options));
}

TEST_CASE("empty graphs still render valid documents") {
    BehaviourGraph g;
    g.window = window_weights(0, 100, 2.0);
    RenderOptions options;
    Layout layout = make_layout(0, options);
    std::string svg = render_frame(g, layout, options);
    CHECK(well_formed_xml(svg));
    CHECK(svg.find("window [0, 100)") != std::string::npos);
}

TEST_CASE("sweep rendering writes frames plus an index") {
    TraceSet set = demo_set();
    SweepParams params;
    params.window_length = 200;
    params.stride = 200;
    params.delta_max = 4;
    auto graphs = window_sweep(set, params);
    REQUIRE(graphs.size() == 3);

    auto dir = std::filesystem::temp_directory_path() / "soclens_render_test";
    std::filesystem::remove_all(dir);
    RenderOptions options;
    options.delta_max = params.delta_max;
    auto files = render_sweep(graphs, dir, options);
    REQUIRE(files.size() == 4); // 3 frames + index
    CHECK(std::filesystem::exists(dir / "frame_0_0_200.svg"));
    CHECK(std::filesystem::exists(dir / "frame_2_400_600.svg"));
    CHECK(std::filesystem::exists(dir / "index.html"));

    // node geometry is identical across frames
    auto read = [&](const std::filesystem::path& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    auto t0 = node_transforms(read(dir / "frame_0_0_200.svg"));
    auto t2 = node_transforms(read(dir / "frame_2_400_600.svg"));
    CHECK(t0 == t2);
    CHECK(t0.size() == set.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("rendering an empty sweep emits only the index") {
    auto dir = std::filesystem::temp_directory_path() / "soclens_render_empty";
    std::filesystem::remove_all(dir);
    std::vector<BehaviourGraph> graphs;
    auto files = render_sweep(graphs, dir, RenderOptions{});
    REQUIRE(files.size() == 1);
    CHECK(files[0].filename() == "index.html");
    std::filesystem::remove_all(dir);
}
