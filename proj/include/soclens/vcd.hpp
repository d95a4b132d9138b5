#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "soclens/trace.hpp"

namespace soclens {

struct VcdVar {
    std::string id;   // id-code, e.g. "!" or "#%"
    unsigned width = 1;
    std::string name; // hierarchical, scopes joined with '.'
    std::string type; // wire, reg, ...
};

struct VcdScope {
    std::string name;
    std::string type;
    std::vector<VcdScope> children;
};

struct VcdChange {
    uint64_t time = 0;  // native VCD time units
    uint32_t var = 0;   // index into vars (first var declaring the id-code)
    std::string value;  // MSB-first, normalized to the declared width,
                        // characters in {0,1,x,z}
};

/// Parsed VCD file: declarations plus the ordered value-change stream.
/// Change timestamps are non-decreasing and every change references a
/// declared id-code.
struct VcdDocument {
    uint32_t timescale_magnitude = 1; // 1, 10 or 100
    std::string timescale_unit = "ns";
    std::vector<VcdScope> scopes;
    std::vector<VcdVar> vars;
    std::vector<VcdChange> changes;

    uint64_t last_time() const {
        return changes.empty() ? 0 : changes.back().time;
    }
    std::string timescale_text() const {
        return std::to_string(timescale_magnitude) + timescale_unit;
    }
};

/// Parse a VCD text stream. Honors $scope/$upscope/$var/$enddefinitions/
/// $timescale/$dumpvars/$comment/$date/$version; $dumpoff/$dumpon/$dumpall
/// blocks are applied as ordinary changes. Throws ParseError with a line
/// number on malformed input; a truncated body names the last good
/// timestamp.
VcdDocument parse_vcd(std::istream& in);
VcdDocument parse_vcd_text(const std::string& text);

/// How a multi-bit signal becomes one or more binary traces.
struct BinarizeRule {
    enum class Mode { Nonzero, Bit, Split };
    Mode mode = Mode::Nonzero;
    unsigned bit = 0; // for Mode::Bit

    /// Accepts "nonzero", "split", "bit(k)" and "bit:k".
    static BinarizeRule parse(std::string_view text);
    std::string to_text() const;
};

struct DensifyOptions {
    std::vector<std::string> selection; // names or globs; empty selects all
    BinarizeRule rule;
    uint64_t quantum = 1;               // native time units per cycle
    std::optional<size_t> cycles;       // override for the derived T
};

/// Flatten selected signals to dense binary traces of length
/// T = floor(last_timestamp / quantum) + 1 (unless overridden). Value at a
/// cycle is the last change at or before it; x/z read as 0. Warnings (e.g.
/// signals with no initial value) are appended to `warnings` when given.
TraceSet densify(const VcdDocument& doc, const DensifyOptions& options,
                 std::vector<std::string>* warnings = nullptr);

} // namespace soclens
