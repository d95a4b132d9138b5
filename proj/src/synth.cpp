#include "soclens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "soclens/errors.hpp"

namespace soclens {

namespace {

uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

Xoshiro256::Xoshiro256(uint64_t seed) {
    for (auto& s : state_) s = splitmix64(seed);
}

uint64_t Xoshiro256::next() {
    uint64_t result = rotl(state_[1] * 5, 7) * 9;
    uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

TraceSet gen_probsys(const ProbsysSpec& spec, size_t cycles, uint64_t seed) {
    if (cycles == 0) throw ConfigError("probsys cycle count must be >= 1");

    std::map<std::string, size_t> by_name;
    for (size_t i = 0; i < spec.channels.size(); ++i) {
        const auto& ch = spec.channels[i];
        if (ch.name.empty()) throw ConfigError("channel name must be non-empty");
        if (!by_name.emplace(ch.name, i).second)
            throw ConfigError("duplicate channel name '" + ch.name + "'");
        if (ch.probability < 0.0 || ch.probability > 1.0)
            throw ConfigError("channel '" + ch.name +
                              "' probability must lie in [0,1]");
    }
    for (const auto& ch : spec.channels) {
        if (!ch.reply_to) continue;
        auto it = by_name.find(*ch.reply_to);
        if (it == by_name.end())
            throw ConfigError("channel '" + ch.name + "' replies to unknown "
                              "channel '" + *ch.reply_to + "'");
        if (spec.channels[it->second].reply_to)
            throw ConfigError("channel '" + ch.name +
                              "' replies to another reply channel '" +
                              *ch.reply_to + "'");
    }

    // Request streams first, each from its own deterministic sub-stream.
    std::vector<BinTrace> traces(spec.channels.size());
    for (size_t i = 0; i < spec.channels.size(); ++i) {
        const auto& ch = spec.channels[i];
        if (ch.reply_to) continue;
        uint64_t stream_seed =
            ch.seed ? *ch.seed
                    : seed ^ (0x9e3779b97f4a7c15ull * (uint64_t{i} + 1));
        Xoshiro256 rng(stream_seed);
        BinTrace trace(cycles);
        for (size_t t = 0; t < cycles; ++t)
            if (rng.bernoulli(ch.probability)) trace.set(t, true);
        traces[i] = std::move(trace);
    }
    // Replies echo their request `latency` cycles later.
    for (size_t i = 0; i < spec.channels.size(); ++i) {
        const auto& ch = spec.channels[i];
        if (!ch.reply_to) continue;
        const BinTrace& req = traces[by_name[*ch.reply_to]];
        BinTrace trace(cycles);
        for (size_t t = ch.latency; t < cycles; ++t)
            if (req.bit(t - ch.latency)) trace.set(t, true);
        traces[i] = std::move(trace);
    }

    TraceSet out;
    for (size_t i = 0; i < spec.channels.size(); ++i)
        out.add(spec.channels[i].name, std::move(traces[i]),
                spec.channels[i].group);

    if (spec.emit_derived) {
        // busy: some request has fired and its reply has not yet arrived.
        BinTrace busy(cycles);
        for (const auto& ch : spec.channels) {
            if (!ch.reply_to || ch.latency == 0) continue;
            size_t req_index = *out.find(*ch.reply_to);
            const BinTrace& req = out.trace(req_index);
            for (size_t t = 0; t < cycles; ++t) {
                if (!req.bit(t)) continue;
                size_t stop = std::min(cycles, t + ch.latency);
                for (size_t u = t; u < stop; ++u) busy.set(u, true);
            }
        }
        BinTrace idle = implied(busy, ImpliedKind::Reflect);
        BinTrace stall(cycles);
        Xoshiro256 rng(seed ^ 0xdab5a1ad5aull);
        for (size_t t = 0; t < cycles; ++t) {
            bool fire = rng.bernoulli(spec.stall_probability);
            if (fire && busy.bit(t)) stall.set(t, true);
        }
        out.add("busy", std::move(busy));
        out.add("idle", std::move(idle));
        out.add("stall", std::move(stall));
    }
    return out;
}

namespace {

struct Interval {
    uint64_t start;
    uint64_t end; // exclusive
    size_t function; // index into the schedule list
};

// A call stack cannot partially overlap: intervals of one source must
// nest or be disjoint.
void check_nesting(const std::vector<Interval>& intervals,
                   const std::vector<FunctionSchedule>& functions,
                   const std::string& source) {
    for (size_t a = 0; a < intervals.size(); ++a) {
        for (size_t b = a + 1; b < intervals.size(); ++b) {
            const auto& x = intervals[a];
            const auto& y = intervals[b];
            if (x.end <= y.start || y.end <= x.start) continue; // disjoint
            bool x_in_y = y.start <= x.start && x.end <= y.end;
            bool y_in_x = x.start <= y.start && y.end <= x.end;
            if (x.start == y.start && x.end == y.end && x.function != y.function)
                throw ConfigError(
                    "functions '" + functions[x.function].name + "' and '" +
                    functions[y.function].name + "' of source '" + source +
                    "' are scheduled over the identical interval [" +
                    std::to_string(x.start) + ", " + std::to_string(x.end) +
                    ")");
            if (!x_in_y && !y_in_x)
                throw ConfigError(
                    "overlapping schedules for source '" + source + "': '" +
                    functions[x.function].name + "' [" +
                    std::to_string(x.start) + ", " + std::to_string(x.end) +
                    ") vs '" + functions[y.function].name + "' [" +
                    std::to_string(y.start) + ", " + std::to_string(y.end) +
                    ")");
        }
    }
}

} // namespace

EventLog gen_tinn_like(const std::vector<FunctionSchedule>& functions,
                       size_t cycles) {
    // Expand phase schedules into activity intervals, clipped to the trace.
    std::map<std::string, std::vector<Interval>> per_source;
    std::vector<std::string> source_order;
    for (size_t f = 0; f < functions.size(); ++f) {
        const auto& fn = functions[f];
        if (fn.source.empty() || fn.name.empty())
            throw ConfigError("function source and name must be non-empty");
        if (!per_source.count(fn.source)) source_order.push_back(fn.source);
        auto& intervals = per_source[fn.source];
        for (const auto& phase : fn.phases) {
            if (phase.duty < 0.0 || phase.duty > 1.0)
                throw ConfigError("phase duty must lie in [0,1]");
            if (phase.end <= phase.start) continue;
            uint64_t end = std::min<uint64_t>(phase.end, cycles);
            if (phase.start >= end || phase.duty == 0.0) continue;
            if (phase.duty == 1.0) {
                intervals.push_back({phase.start, end, f});
                continue;
            }
            if (phase.period == 0)
                throw ConfigError("phase period must be >= 1");
            uint64_t active =
                static_cast<uint64_t>(std::llround(
                    phase.duty * static_cast<double>(phase.period)));
            if (active == 0) continue;
            for (uint64_t s = phase.start; s < end; s += phase.period)
                intervals.push_back({s, std::min(end, s + active), f});
        }
    }

    for (auto& source : source_order)
        check_nesting(per_source[source], functions, source);

    // Emit events: exits before enters at the same instant; among same-time
    // enters the outer (longer) interval goes first, among exits the inner
    // goes first. Sources are interleaved in declaration order.
    struct Event {
        uint64_t time;
        int type; // 0 exit, 1 enter
        uint64_t span_key;
        size_t source_index;
        size_t function;
    };
    std::vector<Event> events;
    for (size_t si = 0; si < source_order.size(); ++si) {
        for (const auto& iv : per_source[source_order[si]]) {
            bool emit_exit = iv.end < cycles;
            events.push_back(
                {iv.start, 1, ~(iv.end - iv.start), si, iv.function});
            if (emit_exit)
                events.push_back({iv.end, 0, iv.end - iv.start, si,
                                  iv.function});
        }
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& a,
                                                      const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.source_index != b.source_index)
            return a.source_index < b.source_index;
        if (a.type != b.type) return a.type < b.type;
        return a.span_key < b.span_key;
    });

    EventLog log;
    log.records.reserve(events.size());
    for (const auto& ev : events) {
        const auto& fn = functions[ev.function];
        log.records.push_back(EventRecord{
            ev.time, fn.source, fn.name,
            ev.type ? EventKind::Enter : EventKind::Exit});
    }
    return log;
}

} // namespace soclens
