#include "soclens/vcd.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include "soclens/errors.hpp"

namespace soclens {

namespace {

// Whitespace-delimited tokenizer with line tracking for error reports.
class Tokenizer {
public:
    explicit Tokenizer(std::istream& in) : in_(in) {}

    std::optional<std::string> next() {
        std::string tok;
        char c;
        while (in_.get(c)) {
            if (c == '\n') ++line_;
            if (!std::isspace(static_cast<unsigned char>(c))) {
                tok.push_back(c);
                break;
            }
        }
        if (tok.empty()) return std::nullopt;
        while (in_.get(c)) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (c == '\n') ++line_;
                break;
            }
            tok.push_back(c);
        }
        return tok;
    }

    size_t line() const { return line_; }

private:
    std::istream& in_;
    size_t line_ = 1;
};

uint64_t parse_u64(const std::string& text, size_t line, const char* what) {
    uint64_t value = 0;
    auto [p, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ParseError(std::string("invalid ") + what + " '" + text + "'",
                         line);
    return value;
}

bool is_value_char(char c) {
    return c == '0' || c == '1' || c == 'x' || c == 'X' || c == 'z' ||
           c == 'Z';
}

// Left-extend a b-format payload to the declared width. Leading 0/1 extend
// with 0; leading x/z extend with themselves.
std::string normalize_vector(const std::string& payload, unsigned width,
                             size_t line) {
    std::string bits;
    bits.reserve(payload.size());
    for (char c : payload) {
        char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lc != '0' && lc != '1' && lc != 'x' && lc != 'z')
            throw ParseError("invalid vector value character '" +
                                 std::string(1, c) + "'",
                             line);
        bits.push_back(lc);
    }
    if (bits.empty()) throw ParseError("empty vector value", line);
    if (bits.size() > width) {
        // Allow redundant leading zeros, reject real overflow.
        size_t extra = bits.size() - width;
        if (bits.compare(0, extra, std::string(extra, '0')) != 0)
            throw ParseError("vector value wider than declared width " +
                                 std::to_string(width),
                             line);
        bits.erase(0, extra);
    } else if (bits.size() < width) {
        char fill = (bits[0] == 'x' || bits[0] == 'z') ? bits[0] : '0';
        bits.insert(0, width - bits.size(), fill);
    }
    return bits;
}

} // namespace

VcdDocument parse_vcd(std::istream& in) {
    Tokenizer tok(in);
    VcdDocument doc;
    std::map<std::string, uint32_t> id_to_var; // id-code -> first var index
    std::vector<VcdScope*> scope_stack;
    std::vector<std::string> scope_names;

    auto skip_until_end = [&](const char* directive) {
        for (;;) {
            auto t = tok.next();
            if (!t)
                throw ParseError(std::string("unexpected end of file inside ") +
                                     directive,
                                 tok.line());
            if (*t == "$end") return;
        }
    };

    // --- declaration section ---
    bool saw_enddefinitions = false;
    std::vector<std::string> timescale_tokens;
    while (!saw_enddefinitions) {
        auto t = tok.next();
        if (!t)
            throw ParseError("unexpected end of file before $enddefinitions",
                             tok.line());
        const std::string& s = *t;
        if (s == "$date" || s == "$version" || s == "$comment") {
            skip_until_end(s.c_str());
        } else if (s == "$timescale") {
            timescale_tokens.clear();
            for (;;) {
                auto u = tok.next();
                if (!u)
                    throw ParseError("unexpected end of file inside $timescale",
                                     tok.line());
                if (*u == "$end") break;
                timescale_tokens.push_back(*u);
            }
            std::string joined;
            for (const auto& part : timescale_tokens) joined += part;
            size_t pos = 0;
            while (pos < joined.size() &&
                   std::isdigit(static_cast<unsigned char>(joined[pos])))
                ++pos;
            if (pos == 0 || pos == joined.size())
                throw ParseError("malformed $timescale '" + joined + "'",
                                 tok.line());
            uint64_t mag = parse_u64(joined.substr(0, pos), tok.line(),
                                     "timescale magnitude");
            std::string unit = joined.substr(pos);
            static const char* kUnits[] = {"s", "ms", "us", "ns", "ps", "fs"};
            if (std::find_if(std::begin(kUnits), std::end(kUnits),
                             [&](const char* u2) { return unit == u2; }) ==
                    std::end(kUnits) ||
                (mag != 1 && mag != 10 && mag != 100))
                throw ParseError("malformed $timescale '" + joined + "'",
                                 tok.line());
            doc.timescale_magnitude = static_cast<uint32_t>(mag);
            doc.timescale_unit = unit;
        } else if (s == "$scope") {
            auto type = tok.next();
            auto name = tok.next();
            if (!type || !name)
                throw ParseError("unexpected end of file inside $scope",
                                 tok.line());
            skip_until_end("$scope");
            VcdScope scope{*name, *type, {}};
            auto& siblings =
                scope_stack.empty() ? doc.scopes : scope_stack.back()->children;
            siblings.push_back(std::move(scope));
            scope_stack.push_back(&siblings.back());
            scope_names.push_back(*name);
        } else if (s == "$upscope") {
            if (scope_stack.empty())
                throw ParseError("$upscope without matching $scope",
                                 tok.line());
            skip_until_end("$upscope");
            scope_stack.pop_back();
            scope_names.pop_back();
        } else if (s == "$var") {
            auto type = tok.next();
            auto width_tok = tok.next();
            auto id = tok.next();
            if (!type || !width_tok || !id)
                throw ParseError("unexpected end of file inside $var",
                                 tok.line());
            uint64_t width = parse_u64(*width_tok, tok.line(), "$var width");
            if (width == 0 || width > 4096)
                throw ParseError("unsupported $var width " + *width_tok,
                                 tok.line());
            std::string name;
            for (;;) {
                auto part = tok.next();
                if (!part)
                    throw ParseError("unexpected end of file inside $var",
                                     tok.line());
                if (*part == "$end") break;
                name += *part; // joins "data [3:0]" into "data[3:0]"
            }
            if (name.empty())
                throw ParseError("$var declaration without a name",
                                 tok.line());
            std::string full;
            for (const auto& sn : scope_names) full += sn + ".";
            full += name;
            VcdVar var{*id, static_cast<unsigned>(width), full, *type};
            if (!id_to_var.count(*id))
                id_to_var[*id] = static_cast<uint32_t>(doc.vars.size());
            doc.vars.push_back(std::move(var));
        } else if (s == "$enddefinitions") {
            skip_until_end("$enddefinitions");
            saw_enddefinitions = true;
        } else {
            throw ParseError("unexpected token '" + s +
                                 "' in declaration section",
                             tok.line());
        }
    }

    // --- value-change section ---
    uint64_t now = 0;
    bool have_time = false;
    auto last_good = [&]() {
        return have_time ? std::to_string(now) : std::string("<none>");
    };

    auto lookup = [&](const std::string& id) -> uint32_t {
        auto it = id_to_var.find(id);
        if (it == id_to_var.end())
            throw ParseError("change references undeclared id-code '" + id +
                                 "' at timestamp " +
                                 (have_time ? std::to_string(now) : "0"),
                             tok.line());
        return it->second;
    };

    auto apply_change = [&](const std::string& token) {
        char head = token[0];
        if (is_value_char(head)) {
            if (token.size() < 2)
                throw ParseError("scalar change '" + token +
                                     "' is missing its id-code (last good "
                                     "timestamp " +
                                     last_good() + ")",
                                 tok.line());
            std::string id = token.substr(1);
            uint32_t vi = lookup(id);
            char v = static_cast<char>(
                std::tolower(static_cast<unsigned char>(head)));
            // A scalar change drives bit 0; wider vars keep upper bits 0.
            std::string value(doc.vars[vi].width, '0');
            value.back() = v;
            doc.changes.push_back(VcdChange{now, vi, std::move(value)});
        } else if (head == 'b' || head == 'B') {
            std::string payload = token.substr(1);
            auto id = tok.next();
            if (!id)
                throw ParseError(
                    "truncated file: vector change without id-code (last "
                    "good timestamp " +
                        last_good() + ")",
                    tok.line());
            uint32_t vi = lookup(*id);
            doc.changes.push_back(VcdChange{
                now, vi,
                normalize_vector(payload, doc.vars[vi].width, tok.line())});
        } else if (head == 'r' || head == 'R') {
            throw ParseError("real-valued changes are not supported",
                             tok.line());
        } else {
            throw ParseError("unexpected token '" + token +
                                 "' in value-change section (last good "
                                 "timestamp " +
                                 last_good() + ")",
                             tok.line());
        }
    };

    bool in_dump_block = false;
    for (;;) {
        auto t = tok.next();
        if (!t) {
            if (in_dump_block)
                throw ParseError("truncated file inside $dump block (last "
                                 "good timestamp " +
                                     last_good() + ")",
                                 tok.line());
            break;
        }
        const std::string& s = *t;
        if (s[0] == '#') {
            uint64_t ts = parse_u64(s.substr(1), tok.line(), "timestamp");
            if (have_time && ts < now)
                throw ParseError("timestamps must be non-decreasing (" +
                                     std::to_string(ts) + " after " +
                                     std::to_string(now) + ")",
                                 tok.line());
            now = ts;
            have_time = true;
        } else if (s == "$dumpvars" || s == "$dumpall" || s == "$dumpon" ||
                   s == "$dumpoff") {
            in_dump_block = true;
        } else if (s == "$end") {
            if (!in_dump_block)
                throw ParseError("stray $end in value-change section",
                                 tok.line());
            in_dump_block = false;
        } else if (s == "$comment") {
            skip_until_end("$comment");
        } else {
            apply_change(s);
        }
    }
    return doc;
}

VcdDocument parse_vcd_text(const std::string& text) {
    std::istringstream in(text);
    return parse_vcd(in);
}

BinarizeRule BinarizeRule::parse(std::string_view text) {
    BinarizeRule rule;
    if (text == "nonzero") {
        rule.mode = Mode::Nonzero;
        return rule;
    }
    if (text == "split") {
        rule.mode = Mode::Split;
        return rule;
    }
    std::string inner;
    if (text.starts_with("bit(") && text.ends_with(")"))
        inner = std::string(text.substr(4, text.size() - 5));
    else if (text.starts_with("bit:"))
        inner = std::string(text.substr(4));
    if (!inner.empty()) {
        unsigned bit = 0;
        auto [p, ec] =
            std::from_chars(inner.data(), inner.data() + inner.size(), bit);
        if (ec == std::errc{} && p == inner.data() + inner.size()) {
            rule.mode = Mode::Bit;
            rule.bit = bit;
            return rule;
        }
    }
    throw ConfigError("invalid binarize rule '" + std::string(text) +
                      "'; expected nonzero, split or bit(k)");
}

std::string BinarizeRule::to_text() const {
    switch (mode) {
    case Mode::Nonzero: return "nonzero";
    case Mode::Split: return "split";
    case Mode::Bit: return "bit(" + std::to_string(bit) + ")";
    }
    return "nonzero";
}

namespace {

bool glob_match(std::string_view pattern, std::string_view text) {
    // '*' matches any run of characters; no other metacharacters.
    size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() &&
            (pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::string_view last_segment(std::string_view name) {
    size_t dot = name.rfind('.');
    return dot == std::string_view::npos ? name : name.substr(dot + 1);
}

} // namespace

TraceSet densify(const VcdDocument& doc, const DensifyOptions& options,
                 std::vector<std::string>* warnings) {
    if (options.quantum == 0) throw ConfigError("quantum must be >= 1");

    // Resolve the selection to var indices, preserving selection order and
    // de-duplicating. A pattern matches the full dotted name or its last
    // segment.
    std::vector<uint32_t> selected;
    auto add_var = [&](uint32_t vi) {
        if (std::find(selected.begin(), selected.end(), vi) == selected.end())
            selected.push_back(vi);
    };
    if (options.selection.empty()) {
        for (uint32_t vi = 0; vi < doc.vars.size(); ++vi) add_var(vi);
    } else {
        for (const auto& pattern : options.selection) {
            bool any = false;
            for (uint32_t vi = 0; vi < doc.vars.size(); ++vi) {
                const auto& name = doc.vars[vi].name;
                if (glob_match(pattern, name) ||
                    glob_match(pattern, last_segment(name))) {
                    add_var(vi);
                    any = true;
                }
            }
            if (!any) {
                std::string names;
                for (const auto& var : doc.vars) {
                    if (!names.empty()) names += ", ";
                    names += var.name;
                }
                throw ConfigError("selection '" + pattern +
                                  "' matches no signal; available: " +
                                  (names.empty() ? "<none>" : names));
            }
        }
    }

    size_t cycles = options.cycles
                        ? *options.cycles
                        : static_cast<size_t>(doc.last_time() /
                                              options.quantum) +
                              1;
    if (cycles == 0) throw ConfigError("derived cycle count is zero");

    // Changes per var, in id-code terms: a change applies to every alias of
    // its id-code, which parse_vcd already collapsed to the first var index.
    std::map<std::string, std::vector<const VcdChange*>> by_id;
    for (const auto& change : doc.changes)
        by_id[doc.vars[change.var].id].push_back(&change);

    TraceSet out;
    out.timescale = doc.timescale_text();

    auto bit_of = [](const std::string& value, unsigned width,
                     unsigned k) -> bool {
        // MSB-first storage; bit k counts from the LSB. x/z read as 0.
        return k < width && value[width - 1 - k] == '1';
    };

    for (uint32_t vi : selected) {
        const VcdVar& var = doc.vars[vi];
        std::vector<const VcdChange*> empty;
        const auto& changes =
            by_id.count(var.id) ? by_id[var.id] : empty;

        if (!changes.empty() &&
            changes.front()->time / options.quantum > 0 && warnings)
            warnings->push_back("signal '" + var.name +
                                "' has no value before t=" +
                                std::to_string(changes.front()->time) +
                                "; reading 0 until then");
        if (changes.empty() && warnings)
            warnings->push_back("signal '" + var.name +
                                "' is never assigned; reading all 0");

        auto fill = [&](unsigned k) {
            BinTrace trace(cycles);
            size_t ci = 0;
            bool current = false;
            for (size_t c = 0; c < cycles; ++c) {
                while (ci < changes.size() &&
                       changes[ci]->time / options.quantum <= c) {
                    const auto& v = changes[ci]->value;
                    if (options.rule.mode == BinarizeRule::Mode::Nonzero &&
                        var.width > 1)
                        current = v.find('1') != std::string::npos;
                    else
                        current = bit_of(v, var.width, k);
                    ++ci;
                }
                if (current) trace.set(c, true);
            }
            return trace;
        };

        switch (options.rule.mode) {
        case BinarizeRule::Mode::Nonzero:
            out.add(var.name, fill(0));
            break;
        case BinarizeRule::Mode::Bit:
            if (options.rule.bit >= var.width)
                throw ConfigError("bit(" + std::to_string(options.rule.bit) +
                                  ") out of range for signal '" + var.name +
                                  "' of width " + std::to_string(var.width));
            out.add(var.name, fill(options.rule.bit));
            break;
        case BinarizeRule::Mode::Split:
            if (var.width == 1) {
                out.add(var.name, fill(0));
            } else {
                for (unsigned k = 0; k < var.width; ++k)
                    out.add(var.name + "[" + std::to_string(k) + "]",
                            fill(k));
            }
            break;
        }
    }
    return out;
}

} // namespace soclens
