#include "soclens/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "soclens/errors.hpp"
#include "soclens/eventlog.hpp"
#include "soclens/fixture.hpp"
#include "soclens/graph.hpp"
#include "soclens/render.hpp"
#include "soclens/vcd.hpp"

namespace soclens {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitParse = 2;
constexpr int kExitIo = 3;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char c : text) {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<ImpliedKind> parse_kinds(const std::string& text) {
    std::vector<ImpliedKind> kinds;
    for (const auto& name : split_list(text)) {
        auto kind = kind_from_string(name);
        if (!kind)
            throw ConfigError("kinds: unknown implied kind '" + name +
                              "'; expected level, reflect, rise or fall");
        if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end())
            kinds.push_back(*kind);
    }
    if (kinds.empty()) throw ConfigError("kinds: set must be non-empty");
    // canonical order keeps sweeps deterministic under flag reordering
    std::sort(kinds.begin(), kinds.end());
    return kinds;
}

unsigned env_thread_cap() {
    const char* env = std::getenv("SOCLENS_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) return 0;
    return static_cast<unsigned>(v);
}

TraceSet ingest(const RunConfig& config, std::vector<std::string>& warnings) {
    if (config.input.empty())
        throw ConfigError("input: no input file given (use --input)");

    if (config.format == "vcd") {
        std::ifstream in(config.input, std::ios::binary);
        if (!in) throw IoError("cannot open input file " + config.input);
        VcdDocument doc = parse_vcd(in);
        DensifyOptions options;
        options.selection = config.select;
        options.rule = BinarizeRule::parse(config.binarize);
        options.quantum = config.quantum;
        if (config.cycles) options.cycles = *config.cycles;
        return densify(doc, options, &warnings);
    }
    if (config.format == "events") {
        std::ifstream in(config.input, std::ios::binary);
        if (!in) throw IoError("cannot open input file " + config.input);
        EventLog log = parse_eventlog(in);
        size_t cycles;
        if (config.cycles) {
            cycles = *config.cycles;
        } else {
            uint64_t last = 0;
            for (const auto& rec : log.records)
                last = std::max(last, rec.timestamp);
            cycles = static_cast<size_t>(last / config.quantum) + 1;
        }
        return functions_to_traces(log, cycles, config.quantum, &warnings);
    }
    if (config.format == "fixture") {
        Fixture fixture = load_fixture(config.input);
        if (config.seed) {
            if (auto* p = std::get_if<ProbsysFixture>(&fixture))
                p->seed = *config.seed;
        }
        return build_fixture(fixture, &warnings);
    }
    throw ConfigError("format: unknown input format '" + config.format +
                      "'; expected vcd, events or fixture");
}

} // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        std::vector<std::string> warnings;
        TraceSet traces = ingest(config, warnings);
        for (const auto& w : warnings) err << "warning: " << w << "\n";
        if (traces.empty())
            throw ConfigError("input: no measurements selected");

        if (config.window_length > traces.cycles())
            throw ConfigError(
                "window.length " + std::to_string(config.window_length) +
                " exceeds the trace length " +
                std::to_string(traces.cycles()) + " of " + config.input);

        SweepParams params;
        params.window_length = config.window_length;
        params.stride = config.stride;
        params.alpha = config.alpha;
        params.delta_max = config.delta_max;
        params.eps_dep = config.eps_dep;
        params.eps_cov = config.eps_cov;
        params.kinds = parse_kinds(config.kinds);
        params.include_self_pairs = config.include_self;
        params.threads = config.threads ? config.threads : env_thread_cap();

        std::vector<BehaviourGraph> graphs = window_sweep(traces, params);

        bool emit_svg = false, emit_json = false;
        for (const auto& item : split_list(config.emit)) {
            if (item == "svg")
                emit_svg = true;
            else if (item == "graph-json")
                emit_json = true;
            else
                throw ConfigError("emit: unknown artifact '" + item +
                                  "'; expected svg or graph-json");
        }

        std::filesystem::path out_dir(config.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
            throw IoError("cannot create output directory " +
                          out_dir.string() + ": " + ec.message());

        if (emit_svg) {
            RenderOptions render;
            render.gamma = config.gamma;
            render.delta_max = config.delta_max;
            render_sweep(graphs, out_dir, render);
        }
        if (emit_json) {
            auto path = out_dir / "graph.json";
            std::ofstream json_out(path, std::ios::binary);
            if (!json_out) throw IoError("cannot write " + path.string());
            json_out << graphs_to_json(graphs, traces, params);
            if (!json_out) throw IoError("write failed for " + path.string());
        }

        for (size_t k = 0; k < graphs.size(); ++k)
            out << "window " << k << " [" << graphs[k].window.u << ", "
                << graphs[k].window.v << "): " << graphs[k].nodes.size()
                << " nodes, " << graphs[k].edges.size() << " edges\n";
        return kExitOk;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    RunConfig config;
    bool dump_config = false;

    CLI::App app{"soclens: behaviour-graph analysis of binary SoC traces"};
    app.set_config("--config", "", "Read options from a TOML config file");
    app.add_option("--input", config.input, "Input file");
    app.add_option("--format", config.format,
                   "Input format: vcd, events or fixture")
        ->check(CLI::IsMember({"vcd", "events", "fixture"}));
    app.add_option("--select", config.select,
                   "Signal names or globs (repeatable)")
        ->delimiter(',');
    app.add_option("--binarize", config.binarize,
                   "Multi-bit rule: nonzero, bit(k) or split");
    app.add_option("--quantum", config.quantum,
                   "Time units per cycle when quantizing input timestamps")
        ->check(CLI::PositiveNumber);
    app.add_option("--cycles", config.cycles,
                   "Override the derived trace length in cycles");
    app.add_option("--window-length", config.window_length,
                   "Window length in cycles");
    app.add_option("--stride", config.stride,
                   "Window stride in cycles (0: half the length)");
    app.add_option("--alpha", config.alpha, "Window exponent (0: rectangular)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--delta-max", config.delta_max,
                   "Largest shift searched, in cycles")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--eps-dep", config.eps_dep, "Dependency threshold")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--eps-cov", config.eps_cov, "Covariance threshold")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--gamma", config.gamma, "Colourspace exponent")
        ->check(CLI::PositiveNumber);
    app.add_option("--kinds", config.kinds,
                   "Implied kinds to sweep, comma separated");
    app.add_flag("--include-self", config.include_self,
                 "Also link implied forms of the same measurement");
    app.add_option("--out", config.out_dir, "Output directory");
    app.add_option("--emit", config.emit,
                   "Artifacts to write: svg,graph-json");
    app.add_option("--seed", config.seed, "Override the fixture seed");
    app.add_option("--threads", config.threads,
                   "Worker cap (0: SOCLENS_THREADS or hardware)");
    app.add_flag("--dump-config", dump_config,
                 "Print the effective config as TOML and exit");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            out << app.help();
            return kExitOk;
        }
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (dump_config) {
        out << app.config_to_str(true, false);
        return kExitOk;
    }
    return run(config, out, err);
}

} // namespace soclens
