#include "soclens/eventlog.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "soclens/errors.hpp"

namespace soclens {

namespace {

std::string strip(std::string text) {
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ' ||
                             text.back() == '\t'))
        text.pop_back();
    size_t start = text.find_first_not_of(" \t");
    return start == std::string::npos ? std::string{} : text.substr(start);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(strip(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(strip(field));
    return fields;
}

} // namespace

EventLog parse_eventlog(std::istream& in) {
    EventLog log;
    std::string line;
    size_t line_no = 0;

    if (!std::getline(in, line))
        throw ParseError("empty input; expected header "
                         "'timestamp,source,function,kind'",
                         1);
    ++line_no;
    if (strip(line) != "timestamp,source,function,kind")
        throw ParseError("bad header '" + strip(line) +
                             "'; expected 'timestamp,source,function,kind'",
                         line_no);

    std::map<std::string, uint64_t> last_per_source;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 4)
            throw ParseError("expected 4 fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        EventRecord rec;
        auto [p, ec] = std::from_chars(
            fields[0].data(), fields[0].data() + fields[0].size(),
            rec.timestamp);
        if (ec != std::errc{} || p != fields[0].data() + fields[0].size())
            throw ParseError("invalid timestamp '" + fields[0] + "'",
                             line_no);
        rec.source = fields[1];
        rec.function = fields[2];
        if (rec.source.empty() || rec.function.empty())
            throw ParseError("source and function must be non-empty",
                             line_no);
        if (fields[3] == "enter")
            rec.kind = EventKind::Enter;
        else if (fields[3] == "exit")
            rec.kind = EventKind::Exit;
        else
            throw ParseError("unknown kind '" + fields[3] +
                                 "'; expected enter or exit",
                             line_no);
        auto it = last_per_source.find(rec.source);
        if (it != last_per_source.end() && rec.timestamp < it->second)
            throw ParseError("timestamps for source '" + rec.source +
                                 "' must be non-decreasing (" +
                                 std::to_string(rec.timestamp) + " after " +
                                 std::to_string(it->second) + ")",
                             line_no);
        last_per_source[rec.source] = rec.timestamp;
        log.records.push_back(std::move(rec));
    }
    return log;
}

EventLog parse_eventlog_text(const std::string& text) {
    std::istringstream in(text);
    return parse_eventlog(in);
}

TraceSet functions_to_traces(const EventLog& log, size_t cycles,
                             uint64_t quantum,
                             std::vector<std::string>* warnings) {
    if (quantum == 0) throw ConfigError("quantum must be >= 1");
    if (cycles == 0) throw ConfigError("cycle count must be >= 1");

    struct PairState {
        std::string name;
        long counter = 0;
        std::vector<int32_t> delta; // +1 at enter cycle, -1 at exit cycle
    };
    std::vector<PairState> pairs; // ordered by first appearance
    std::map<std::string, size_t> index;

    for (size_t r = 0; r < log.records.size(); ++r) {
        const auto& rec = log.records[r];
        uint64_t cycle = rec.timestamp / quantum;
        if (cycle >= cycles)
            throw ConfigError(
                "record " + std::to_string(r) + " at timestamp " +
                std::to_string(rec.timestamp) + " quantizes to cycle " +
                std::to_string(cycle) + ", beyond the trace length " +
                std::to_string(cycles));
        std::string name = rec.source + "." + rec.function;
        auto [it, fresh] = index.try_emplace(name, pairs.size());
        if (fresh) {
            pairs.push_back({name, 0, std::vector<int32_t>(cycles + 1, 0)});
        }
        PairState& pair = pairs[it->second];
        if (rec.kind == EventKind::Enter) {
            ++pair.counter;
            ++pair.delta[cycle];
        } else {
            if (pair.counter == 0)
                throw ParseError("record " + std::to_string(r) + ": exit of " +
                                 name + " without a prior enter");
            --pair.counter;
            --pair.delta[cycle];
        }
    }

    TraceSet out;
    for (auto& pair : pairs) {
        if (pair.counter > 0 && warnings)
            warnings->push_back("function '" + pair.name +
                                "' never exits; treating it as active "
                                "through the end of the trace");
        BinTrace trace(cycles);
        long depth = 0;
        for (size_t c = 0; c < cycles; ++c) {
            depth += pair.delta[c];
            if (depth > 0) trace.set(c, true);
        }
        out.add(pair.name, std::move(trace));
    }
    return out;
}

} // namespace soclens
