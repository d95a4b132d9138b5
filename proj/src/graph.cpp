#include "soclens/graph.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "soclens/errors.hpp"

namespace soclens {

namespace {

// Implied traces and whole-trace expectations, computed once per run and
// shared read-only by all window workers.
struct ImpliedSet {
    // [measurement][kind]
    std::vector<std::array<BinTrace, 4>> traces;
    std::vector<std::array<double, 4>> global_ex;
};

ImpliedSet precompute_implied(const TraceSet& ts) {
    ImpliedSet out;
    out.traces.resize(ts.size());
    out.global_ex.resize(ts.size());
    double t = static_cast<double>(ts.cycles());
    for (size_t m = 0; m < ts.size(); ++m) {
        for (ImpliedKind k : kAllKinds) {
            auto idx = static_cast<size_t>(k);
            out.traces[m][idx] = implied(ts.trace(m), k);
            out.global_ex[m][idx] =
                static_cast<double>(out.traces[m][idx].count()) / t;
        }
    }
    return out;
}

// Shift order 0, +1, -1, +2, -2, ... so the argmax scan with a strict
// comparison breaks dep*cov ties toward the smallest shift, leading
// direction first.
std::vector<int64_t> shift_scan_order(int64_t delta_max) {
    std::vector<int64_t> order;
    order.reserve(2 * delta_max + 1);
    order.push_back(0);
    for (int64_t d = 1; d <= delta_max; ++d) {
        order.push_back(d);
        order.push_back(-d);
    }
    return order;
}

// Window-local slices of every implied trace at every shift, plus their
// weighted expectations. Indexed [measurement][kind][delta + delta_max].
struct WindowScratch {
    std::vector<std::vector<uint64_t>> slices;
    std::vector<double> ex;
    size_t shifts = 0;

    size_t at(size_t m, size_t kind, int64_t delta, int64_t delta_max) const {
        return (m * 4 + kind) * shifts +
               static_cast<size_t>(delta + delta_max);
    }
};

void fill_scratch(WindowScratch& s, const ImpliedSet& imp,
                  const WindowSpec& window,
                  const detail::WeightTable& table, int64_t delta_max) {
    size_t m_count = imp.traces.size();
    s.shifts = static_cast<size_t>(2 * delta_max + 1);
    s.slices.resize(m_count * 4 * s.shifts);
    s.ex.resize(m_count * 4 * s.shifts);
    for (size_t m = 0; m < m_count; ++m) {
        for (size_t k = 0; k < 4; ++k) {
            for (int64_t d = -delta_max; d <= delta_max; ++d) {
                size_t i = s.at(m, k, d, delta_max);
                s.slices[i] = extract_slice(
                    imp.traces[m][k],
                    static_cast<int64_t>(window.u) + d, window.length());
                s.ex[i] = table.weighted_sum(s.slices[i]) / window.weight_sum;
            }
        }
    }
}

BehaviourGraph build_one(const TraceSet& ts, const ImpliedSet& imp,
                         const WindowSpec& window,
                         const detail::WeightTable& table,
                         const GraphParams& params, WindowScratch& scratch,
                         const std::vector<int64_t>& scan) {
    const int64_t dmax = params.delta_max;
    fill_scratch(scratch, imp, window, table, dmax);

    BehaviourGraph g;
    g.window = window;
    g.nodes.reserve(ts.size());
    for (size_t m = 0; m < ts.size(); ++m) {
        NodeStats n;
        n.id = ts.id(m);
        for (size_t k = 0; k < 4; ++k) {
            n.ex_window[k] = scratch.ex[scratch.at(m, k, 0, dmax)];
            n.ex_global[k] = imp.global_ex[m][k];
        }
        g.nodes.push_back(std::move(n));
    }

    struct Best {
        int64_t delta;
        double dep, cov, ex_y, ex_xy;
    };

    for (size_t i = 0; i < ts.size(); ++i) {
        size_t j_begin = params.include_self_pairs ? i : i + 1;
        for (size_t j = j_begin; j < ts.size(); ++j) {
            for (ImpliedKind ka : params.kinds) {
                auto a = static_cast<size_t>(ka);
                double ex_x = scratch.ex[scratch.at(i, a, 0, dmax)];
                if (ex_x == 0.0) continue;
                const auto& slice_x = scratch.slices[scratch.at(i, a, 0, dmax)];
                for (ImpliedKind kb : params.kinds) {
                    auto b = static_cast<size_t>(kb);
                    // Self pairs: unordered kind pair, never kind vs itself.
                    if (i == j && b <= a) continue;

                    std::optional<Best> best;
                    double best_score = 0.0;
                    for (int64_t d : scan) {
                        size_t yi = scratch.at(j, b, d, dmax);
                        double ex_y = scratch.ex[yi];
                        if (ex_y == 0.0) continue;
                        double ex_xy = table.weighted_and_sum(
                                           slice_x, scratch.slices[yi]) /
                                       window.weight_sum;
                        double d_val = dep(ex_x, ex_y, ex_xy);
                        if (d_val <= params.eps_dep) continue;
                        double c_val = cov(ex_x, ex_y, ex_xy);
                        if (c_val <= params.eps_cov) continue;
                        double score = d_val * c_val;
                        if (!best || score > best_score) {
                            best = Best{d, d_val, c_val, ex_y, ex_xy};
                            best_score = score;
                        }
                    }
                    if (!best) continue;

                    Edge e;
                    e.dep = best->dep;
                    e.cov = best->cov;
                    if (best->delta >= 0) {
                        e.src = EdgeEnd{i, ka};
                        e.dst = EdgeEnd{j, kb};
                        e.delta = best->delta;
                        e.cond_ex = cond_expectation(best->ex_xy, best->ex_y);
                    } else {
                        e.src = EdgeEnd{j, kb};
                        e.dst = EdgeEnd{i, ka};
                        e.delta = -best->delta;
                        e.cond_ex = cond_expectation(best->ex_xy, ex_x);
                    }
                    g.edges.push_back(std::move(e));
                }
            }
        }
    }
    return g;
}

void validate_graph_params(const GraphParams& params) {
    if (params.delta_max < 0)
        throw ConfigError("delta_max must be >= 0");
    if (params.eps_dep < 0.0 || params.eps_cov < 0.0)
        throw ConfigError("eps_dep and eps_cov must be >= 0");
    if (params.kinds.empty())
        throw ConfigError("kinds set must be non-empty");
}

void check_window_inside(const TraceSet& ts, const WindowSpec& window) {
    if (window.v > ts.cycles() || window.u >= window.v)
        throw ConfigError("window [" + std::to_string(window.u) + ", " +
                          std::to_string(window.v) +
                          ") lies outside the trace of length " +
                          std::to_string(ts.cycles()));
}

WindowSpec offset_window(const WindowSpec& base, size_t u) {
    WindowSpec w = base;
    w.u = u;
    w.v = u + base.length();
    return w;
}

} // namespace

std::vector<NodeStats> node_stats(const TraceSet& traces,
                                  const WindowSpec& window) {
    if (traces.empty()) return {};
    check_window_inside(traces, window);
    std::vector<NodeStats> out;
    out.reserve(traces.size());
    for (size_t m = 0; m < traces.size(); ++m) {
        NodeStats n;
        n.id = traces.id(m);
        for (ImpliedKind k : kAllKinds) {
            auto idx = static_cast<size_t>(k);
            BinTrace f = implied(traces.trace(m), k);
            n.ex_window[idx] = expectation(f, window, 0);
            n.ex_global[idx] = static_cast<double>(f.count()) /
                               static_cast<double>(traces.cycles());
        }
        out.push_back(std::move(n));
    }
    return out;
}

BehaviourGraph build_graph(const TraceSet& traces, const WindowSpec& window,
                           const GraphParams& params) {
    validate_graph_params(params);
    check_window_inside(traces, window);
    ImpliedSet imp = precompute_implied(traces);
    detail::WeightTable table(*window.weights);
    WindowScratch scratch;
    auto scan = shift_scan_order(params.delta_max);
    return build_one(traces, imp, window, table, params, scratch, scan);
}

std::vector<BehaviourGraph> window_sweep(const TraceSet& traces,
                                         const SweepParams& params) {
    validate_graph_params(params);
    if (params.window_length > traces.cycles())
        throw ConfigError("window length " +
                          std::to_string(params.window_length) +
                          " exceeds trace length " +
                          std::to_string(traces.cycles()));
    size_t stride = params.stride ? params.stride : params.window_length / 2;
    if (stride == 0)
        throw ConfigError("stride must be >= 1");

    std::vector<size_t> starts;
    for (size_t u = 0; u + params.window_length <= traces.cycles();
         u += stride)
        starts.push_back(u);

    WindowSpec base = window_weights(0, params.window_length, params.alpha);
    ImpliedSet imp = precompute_implied(traces);
    detail::WeightTable table(*base.weights);
    auto scan = shift_scan_order(params.delta_max);

    std::vector<BehaviourGraph> graphs(starts.size());
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned workers = params.threads ? params.threads : hw;
    workers = std::min<unsigned>(workers, starts.size() ? starts.size() : 1);

    if (workers <= 1) {
        WindowScratch scratch;
        for (size_t k = 0; k < starts.size(); ++k)
            graphs[k] = build_one(traces, imp, offset_window(base, starts[k]),
                                  table, params, scratch, scan);
        return graphs;
    }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        WindowScratch scratch;
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= starts.size()) break;
            graphs[k] = build_one(traces, imp, offset_window(base, starts[k]),
                                  table, params, scratch, scan);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return graphs;
}

std::string graphs_to_json(const std::vector<BehaviourGraph>& graphs,
                           const TraceSet& traces, const SweepParams& params) {
    using nlohmann::json;
    json doc;
    doc["schema"] = "soclens.graph/1";
    doc["cycles"] = traces.cycles();
    doc["timescale"] =
        traces.timescale ? json(*traces.timescale) : json(nullptr);

    json p;
    p["window_length"] = params.window_length;
    p["stride"] = params.stride ? params.stride : params.window_length / 2;
    p["alpha"] = params.alpha;
    p["delta_max"] = params.delta_max;
    p["eps_dep"] = params.eps_dep;
    p["eps_cov"] = params.eps_cov;
    json kinds = json::array();
    for (ImpliedKind k : params.kinds) kinds.push_back(to_string(k));
    p["kinds"] = kinds;
    p["include_self_pairs"] = params.include_self_pairs;
    doc["params"] = p;

    json ms = json::array();
    for (const auto& id : traces.ids()) {
        json m;
        m["index"] = id.index;
        m["name"] = id.name;
        m["group"] = id.group ? json(*id.group) : json(nullptr);
        ms.push_back(std::move(m));
    }
    doc["measurements"] = ms;

    json windows = json::array();
    for (size_t k = 0; k < graphs.size(); ++k) {
        const auto& g = graphs[k];
        json w;
        w["index"] = k;
        w["u"] = g.window.u;
        w["v"] = g.window.v;
        json nodes = json::array();
        for (const auto& n : g.nodes) {
            json nj;
            nj["measurement"] = n.id.index;
            json exw, exg;
            for (ImpliedKind kind : kAllKinds) {
                exw[to_string(kind)] = n.ex_window[static_cast<size_t>(kind)];
                exg[to_string(kind)] = n.ex_global[static_cast<size_t>(kind)];
            }
            nj["ex_window"] = exw;
            nj["ex_global"] = exg;
            nodes.push_back(std::move(nj));
        }
        w["nodes"] = nodes;
        json edges = json::array();
        for (const auto& e : g.edges) {
            json ej;
            ej["src"] = {{"measurement", e.src.measurement},
                         {"kind", to_string(e.src.kind)}};
            ej["dst"] = {{"measurement", e.dst.measurement},
                         {"kind", to_string(e.dst.kind)}};
            ej["delta"] = e.delta;
            ej["dep"] = e.dep;
            ej["cov"] = e.cov;
            ej["cond_ex"] = e.cond_ex ? json(*e.cond_ex) : json(nullptr);
            edges.push_back(std::move(ej));
        }
        w["edges"] = edges;
        windows.push_back(std::move(w));
    }
    doc["windows"] = windows;
    return doc.dump(2) + "\n";
}

} // namespace soclens
