#include "soclens/fixture.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "soclens/errors.hpp"
#include "soclens/eventlog.hpp"

namespace soclens {

namespace {

// Minimal TOML subset: [table] / [[array-of-tables]] headers and
// key = value lines with string, integer, float, boolean or flat-array
// values. Enough for fixture files; run configs go through the CLI parser
// instead.
struct TomlValue {
    enum class Type { String, Integer, Float, Boolean, Array } type =
        Type::String;
    std::string str;
    int64_t integer = 0;
    double number = 0.0;
    bool boolean = false;
    std::vector<TomlValue> array;
};

struct TomlTable {
    std::string path; // "" for the root table
    std::map<std::string, TomlValue> values;
    size_t line = 0;
};

std::string strip(const std::string& text) {
    size_t b = text.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    size_t e = text.find_last_not_of(" \t\r");
    return text.substr(b, e - b + 1);
}

TomlValue parse_scalar(const std::string& raw, size_t line) {
    TomlValue v;
    if (raw.empty()) throw ParseError("empty value", line);
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            throw ParseError("unterminated string " + raw, line);
        v.type = TomlValue::Type::String;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.type = TomlValue::Type::Boolean;
        v.boolean = raw == "true";
        return v;
    }
    if (raw.find('.') == std::string::npos &&
        raw.find('e') == std::string::npos) {
        int64_t i = 0;
        auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), i);
        if (ec == std::errc{} && p == raw.data() + raw.size()) {
            v.type = TomlValue::Type::Integer;
            v.integer = i;
            return v;
        }
    }
    try {
        size_t used = 0;
        double d = std::stod(raw, &used);
        if (used == raw.size()) {
            v.type = TomlValue::Type::Float;
            v.number = d;
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ParseError("cannot parse value '" + raw + "'", line);
}

TomlValue parse_value(const std::string& raw, size_t line) {
    if (!raw.empty() && raw.front() == '[') {
        if (raw.back() != ']')
            throw ParseError("unterminated array " + raw, line);
        TomlValue v;
        v.type = TomlValue::Type::Array;
        std::string body = raw.substr(1, raw.size() - 2);
        std::string item;
        bool in_string = false;
        for (char c : body) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                if (!strip(item).empty())
                    v.array.push_back(parse_scalar(strip(item), line));
                item.clear();
            } else {
                item.push_back(c);
            }
        }
        if (!strip(item).empty())
            v.array.push_back(parse_scalar(strip(item), line));
        return v;
    }
    return parse_scalar(raw, line);
}

std::vector<TomlTable> parse_toml(const std::string& text) {
    std::vector<TomlTable> tables;
    tables.push_back(TomlTable{"", {}, 0});
    size_t current = 0;

    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments outside strings.
        std::string cleaned;
        bool in_string = false;
        for (char c : line) {
            if (c == '"') in_string = !in_string;
            if (c == '#' && !in_string) break;
            cleaned.push_back(c);
        }
        cleaned = strip(cleaned);
        if (cleaned.empty()) continue;

        if (cleaned.front() == '[') {
            bool array_table = cleaned.starts_with("[[");
            size_t open = array_table ? 2 : 1;
            size_t close = cleaned.find(array_table ? "]]" : "]", open);
            if (close == std::string::npos ||
                strip(cleaned.substr(close + (array_table ? 2 : 1))) != "")
                throw ParseError("malformed table header '" + cleaned + "'",
                                 line_no);
            std::string name = strip(cleaned.substr(open, close - open));
            if (name.empty())
                throw ParseError("empty table name", line_no);
            if (!array_table) {
                for (size_t i = 0; i < tables.size(); ++i)
                    if (tables[i].path == name)
                        throw ParseError("table [" + name + "] repeated; use "
                                         "[[" + name + "]] for arrays",
                                         line_no);
            }
            tables.push_back(TomlTable{name, {}, line_no});
            current = tables.size() - 1;
            continue;
        }

        size_t eq = cleaned.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value, got '" + cleaned + "'",
                             line_no);
        std::string key = strip(cleaned.substr(0, eq));
        std::string raw = strip(cleaned.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        if (tables[current].values.count(key))
            throw ParseError("duplicate key '" + key + "'", line_no);
        tables[current].values[key] = parse_value(raw, line_no);
    }
    return tables;
}

// --- typed accessors -----------------------------------------------------

const TomlValue* find(const TomlTable& table, const std::string& key) {
    auto it = table.values.find(key);
    return it == table.values.end() ? nullptr : &it->second;
}

std::string need_string(const TomlTable& t, const std::string& key) {
    const TomlValue* v = find(t, key);
    if (!v || v->type != TomlValue::Type::String)
        throw ParseError("fixture: missing or non-string key '" + key +
                             "' in [" + (t.path.empty() ? "root" : t.path) +
                             "]",
                         t.line);
    return v->str;
}

uint64_t get_uint(const TomlTable& t, const std::string& key,
                  uint64_t fallback) {
    const TomlValue* v = find(t, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::Integer || v->integer < 0)
        throw ParseError("fixture: key '" + key +
                             "' must be a non-negative integer",
                         t.line);
    return static_cast<uint64_t>(v->integer);
}

double get_float(const TomlTable& t, const std::string& key,
                 double fallback) {
    const TomlValue* v = find(t, key);
    if (!v) return fallback;
    if (v->type == TomlValue::Type::Float) return v->number;
    if (v->type == TomlValue::Type::Integer)
        return static_cast<double>(v->integer);
    throw ParseError("fixture: key '" + key + "' must be numeric", t.line);
}

bool get_bool(const TomlTable& t, const std::string& key, bool fallback) {
    const TomlValue* v = find(t, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::Boolean)
        throw ParseError("fixture: key '" + key + "' must be a boolean",
                         t.line);
    return v->boolean;
}

Phase parse_phase(const std::string& text, size_t line) {
    // "start:end:period:duty"
    std::vector<std::string> parts;
    std::string part;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(part);
            part.clear();
        } else {
            part.push_back(c);
        }
    }
    parts.push_back(part);
    if (parts.size() != 4)
        throw ParseError("phase '" + text +
                             "' must be start:end:period:duty",
                         line);
    auto to_u64 = [&](const std::string& s) {
        uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ParseError("phase '" + text + "': bad integer '" + s + "'",
                             line);
        return v;
    };
    Phase phase;
    phase.start = to_u64(parts[0]);
    phase.end = to_u64(parts[1]);
    phase.period = to_u64(parts[2]);
    try {
        size_t used = 0;
        phase.duty = std::stod(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument("tail");
    } catch (const std::exception&) {
        throw ParseError("phase '" + text + "': bad duty '" + parts[3] + "'",
                         line);
    }
    return phase;
}

} // namespace

Fixture parse_fixture_text(const std::string& text) {
    auto tables = parse_toml(text);
    const TomlTable& root = tables.front();
    std::string kind = need_string(root, "kind");
    size_t cycles = get_uint(root, "cycles", 0);
    if (cycles == 0)
        throw ParseError("fixture: 'cycles' must be a positive integer",
                         root.line);

    if (kind == "probsys") {
        ProbsysFixture fx;
        fx.cycles = cycles;
        fx.seed = get_uint(root, "seed", 1);
        fx.spec.stall_probability =
            get_float(root, "stall_probability", 0.25);
        fx.spec.emit_derived = get_bool(root, "derived", true);
        for (const auto& table : tables) {
            if (table.path != "channel") continue;
            ChannelModel ch;
            ch.name = need_string(table, "name");
            ch.probability = get_float(table, "p", 0.0);
            if (const TomlValue* v = find(table, "reply_to")) {
                if (v->type != TomlValue::Type::String)
                    throw ParseError("fixture: reply_to must be a string",
                                     table.line);
                ch.reply_to = v->str;
            }
            ch.latency = get_uint(table, "latency", 0);
            if (const TomlValue* v = find(table, "group")) {
                if (v->type != TomlValue::Type::String)
                    throw ParseError("fixture: group must be a string",
                                     table.line);
                ch.group = v->str;
            }
            if (const TomlValue* v = find(table, "seed"))
                ch.seed = static_cast<uint64_t>(v->integer);
            fx.spec.channels.push_back(std::move(ch));
        }
        if (fx.spec.channels.empty())
            throw ParseError("probsys fixture declares no [[channel]]",
                             root.line);
        return fx;
    }

    if (kind == "tinn") {
        TinnFixture fx;
        fx.cycles = cycles;
        fx.quantum = get_uint(root, "quantum", 1);
        for (const auto& table : tables) {
            if (table.path != "function") continue;
            FunctionSchedule fn;
            fn.source = need_string(table, "source");
            fn.name = need_string(table, "name");
            const TomlValue* phases = find(table, "phases");
            if (!phases || phases->type != TomlValue::Type::Array)
                throw ParseError("fixture: [[function]] needs a 'phases' "
                                 "array of \"start:end:period:duty\" strings",
                                 table.line);
            for (const auto& item : phases->array) {
                if (item.type != TomlValue::Type::String)
                    throw ParseError("fixture: phases entries must be strings",
                                     table.line);
                fn.phases.push_back(parse_phase(item.str, table.line));
            }
            fx.functions.push_back(std::move(fn));
        }
        if (fx.functions.empty())
            throw ParseError("tinn fixture declares no [[function]]",
                             root.line);
        return fx;
    }

    throw ParseError("fixture: unknown kind '" + kind +
                         "'; expected probsys or tinn",
                     root.line);
}

Fixture load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open fixture file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_fixture_text(buf.str());
}

TraceSet build_fixture(const Fixture& fixture,
                       std::vector<std::string>* warnings) {
    if (const auto* p = std::get_if<ProbsysFixture>(&fixture))
        return gen_probsys(p->spec, p->cycles, p->seed);
    const auto& t = std::get<TinnFixture>(fixture);
    EventLog log = gen_tinn_like(t.functions, t.cycles);
    return functions_to_traces(log, t.cycles, t.quantum, warnings);
}

} // namespace soclens
