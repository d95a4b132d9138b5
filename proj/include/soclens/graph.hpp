#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "soclens/measures.hpp"
#include "soclens/trace.hpp"

namespace soclens {

/// Per-measurement expectations of the four implied forms, both under the
/// current window and over the whole trace (rectangular weights).
struct NodeStats {
    MeasurementId id;
    std::array<double, 4> ex_window{}; // indexed by ImpliedKind
    std::array<double, 4> ex_global{};
};

struct EdgeEnd {
    size_t measurement = 0;
    ImpliedKind kind = ImpliedKind::Level;

    bool operator==(const EdgeEnd&) const = default;
};

/// One significant link. Orientation is canonical: delta >= 0 and src leads
/// dst by delta cycles; a delta = 0 tie orients by (index, kind) order.
/// cond_ex is E[f_src | f_dst].
struct Edge {
    EdgeEnd src;
    EdgeEnd dst;
    int64_t delta = 0;
    double dep = 0.0;
    double cov = 0.0;
    std::optional<double> cond_ex;
};

/// One window's nodes and significant edges; the unit rendered to one SVG
/// frame. Node order is the TraceSet order and is identical across all
/// windows of a sweep.
struct BehaviourGraph {
    WindowSpec window;
    std::vector<NodeStats> nodes;
    std::vector<Edge> edges;
};

struct GraphParams {
    int64_t delta_max = 16;
    double eps_dep = 0.0;
    double eps_cov = 0.0;
    std::vector<ImpliedKind> kinds = {ImpliedKind::Level, ImpliedKind::Reflect,
                                      ImpliedKind::Rise, ImpliedKind::Fall};
    // Pairs of implied forms of the same measurement are skipped by default;
    // they are trivially dependent and carry no cross-component insight.
    bool include_self_pairs = false;
};

struct SweepParams : GraphParams {
    size_t window_length = 512;
    size_t stride = 0; // 0 selects window_length / 2 (50% overlap)
    double alpha = 2.0;
    unsigned threads = 1; // worker cap for the window sweep
};

/// Per-measurement stats for one window. The window must lie inside [0, T).
std::vector<NodeStats> node_stats(const TraceSet& traces,
                                  const WindowSpec& window);

/// Sweep every unordered measurement pair, every ordered kind combination
/// and every shift in [-delta_max, delta_max]; keep, per directed relation,
/// the single significant shift maximizing dep*cov.
BehaviourGraph build_graph(const TraceSet& traces, const WindowSpec& window,
                           const GraphParams& params);

/// Build one BehaviourGraph per window [k*stride, k*stride + length) while
/// the window fits inside the trace. Windows are processed in parallel;
/// the result is identical regardless of worker count.
std::vector<BehaviourGraph> window_sweep(const TraceSet& traces,
                                         const SweepParams& params);

/// Serialize a sweep to the versioned graph JSON document
/// (schema "soclens.graph/1").
std::string graphs_to_json(const std::vector<BehaviourGraph>& graphs,
                           const TraceSet& traces, const SweepParams& params);

} // namespace soclens
