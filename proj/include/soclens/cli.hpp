#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace soclens {

/// Everything one run needs; every field is mirrored by a command-line
/// flag, and flags win over values read from --config.
struct RunConfig {
    std::string input;
    std::string format = "vcd"; // vcd | events | fixture
    std::vector<std::string> select;
    std::string binarize = "nonzero"; // nonzero | bit(k) | split
    uint64_t quantum = 1;
    std::optional<uint64_t> cycles; // override the derived trace length

    uint64_t window_length = 512;
    uint64_t stride = 0; // 0 selects window_length / 2
    double alpha = 2.0;
    int64_t delta_max = 16;
    double eps_dep = 0.0;
    double eps_cov = 0.0;
    double gamma = 1.0;
    std::string kinds = "level,reflect,rise,fall";
    bool include_self = false;

    std::string out_dir = "soclens-out";
    std::string emit = "svg,graph-json";
    std::optional<uint64_t> seed; // overrides a fixture's seed
    unsigned threads = 0;         // 0: SOCLENS_THREADS or hardware count
};

/// Execute a validated run: ingest, sweep, artifacts, one summary line per
/// window on `out`. Returns a process exit status: 0 success, 1 config
/// error, 2 parse error, 3 I/O error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line front end (flags, --config file, --dump-config).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace soclens
