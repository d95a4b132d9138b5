#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soclens/eventlog.hpp"
#include "soclens/trace.hpp"

namespace soclens {

/// xoshiro256** with splitmix64 seeding (Blackman/Vigna parameters:
/// result = rotl(s1*5, 7)*9, t = s1<<17, rotl(s3, 45)). Fixtures depend on
/// this exact generator so seeded traces are reproducible everywhere;
/// platform PRNGs are deliberately not used.
class Xoshiro256 {
public:
    explicit Xoshiro256(uint64_t seed);

    uint64_t next();

    /// Uniform in [0, 1): 53 mantissa bits of next().
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    uint64_t state_[4];
};

/// One synthetic channel: fires as an independent Bernoulli stream, or
/// echoes another channel a fixed latency later.
struct ChannelModel {
    std::string name;
    double probability = 0.0; // per-cycle fire probability (request channels)
    std::optional<std::string> reply_to;
    uint64_t latency = 0;     // cycles between request and reply
    std::optional<std::string> group; // cluster label carried to the traces
    std::optional<uint64_t> seed;     // per-channel stream override
};

struct ProbsysSpec {
    std::vector<ChannelModel> channels;
    double stall_probability = 0.25;
    bool emit_derived = true; // busy / idle / stall side-channels
};

/// Generate the request/reply channel fixture. Request channels draw from
/// per-channel seeded streams; a reply fires exactly `latency` cycles after
/// its request. With emit_derived: busy is high while any request awaits
/// its reply, idle is its complement, stall is a Bernoulli stream gated to
/// busy cycles.
TraceSet gen_probsys(const ProbsysSpec& spec, size_t cycles, uint64_t seed);

/// One activity burst pattern: within [start, end), the function is entered
/// every `period` cycles and stays active for duty*period cycles. duty = 1
/// produces a single interval covering the whole phase.
struct Phase {
    uint64_t start = 0;
    uint64_t end = 0;
    uint64_t period = 1;
    double duty = 0.0;
};

struct FunctionSchedule {
    std::string source;
    std::string name;
    std::vector<Phase> phases;
};

/// Deterministic enter/exit log realizing the schedules. Intervals of the
/// same source must nest or stay disjoint (a call stack cannot partially
/// overlap); a partial overlap at the same nesting level throws.
EventLog gen_tinn_like(const std::vector<FunctionSchedule>& functions,
                       size_t cycles);

} // namespace soclens
