#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "soclens/trace.hpp"

namespace soclens {

enum class EventKind : uint8_t { Enter, Exit };

struct EventRecord {
    uint64_t timestamp = 0; // declared time units
    std::string source;     // processor or component name
    std::string function;
    EventKind kind = EventKind::Enter;
};

/// Function enter/exit instrumentation log. Timestamps are non-decreasing
/// within each source.
struct EventLog {
    std::vector<EventRecord> records;
};

/// Parse the CSV carrier: header `timestamp,source,function,kind`, one
/// record per line, kind strictly `enter` or `exit`. Throws ParseError
/// with the offending line number.
EventLog parse_eventlog(std::istream& in);
EventLog parse_eventlog_text(const std::string& text);

/// One binary trace per (source, function) pair, named "source.function",
/// high while the function is active on [enter, exit). Nested enters are
/// counted; the pair is active while its counter is positive. An exit
/// without a prior enter throws; an unmatched enter stays active through
/// the end of the trace (with a warning).
TraceSet functions_to_traces(const EventLog& log, size_t cycles,
                             uint64_t quantum = 1,
                             std::vector<std::string>* warnings = nullptr);

} // namespace soclens
