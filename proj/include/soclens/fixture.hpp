#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "soclens/synth.hpp"
#include "soclens/trace.hpp"

namespace soclens {

/// probsys-style fixture: channel models plus derived side-channels.
struct ProbsysFixture {
    ProbsysSpec spec;
    size_t cycles = 0;
    uint64_t seed = 1;
};

/// tinn-style fixture: scheduled function activity on named processors,
/// materialized through the event-log path.
struct TinnFixture {
    std::vector<FunctionSchedule> functions;
    size_t cycles = 0;
    uint64_t quantum = 1;
};

using Fixture = std::variant<ProbsysFixture, TinnFixture>;

/// Load a fixture description (TOML: scalar keys, [[channel]] or
/// [[function]] tables, phases as "start:end:period:duty" strings).
Fixture load_fixture(const std::filesystem::path& path);
Fixture parse_fixture_text(const std::string& text);

/// Generate the fixture's traces. Warnings (e.g. functions that never
/// exit) are appended when `warnings` is given.
TraceSet build_fixture(const Fixture& fixture,
                       std::vector<std::string>* warnings = nullptr);

} // namespace soclens
