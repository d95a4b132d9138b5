#include "soclens/trace.hpp"

#include <bit>
#include <cassert>

#include "soclens/errors.hpp"

namespace soclens {

const char* to_string(ImpliedKind kind) {
    switch (kind) {
    case ImpliedKind::Level: return "level";
    case ImpliedKind::Reflect: return "reflect";
    case ImpliedKind::Rise: return "rise";
    case ImpliedKind::Fall: return "fall";
    }
    return "?";
}

std::optional<ImpliedKind> kind_from_string(std::string_view name) {
    for (ImpliedKind k : kAllKinds)
        if (name == to_string(k)) return k;
    return std::nullopt;
}

BinTrace::BinTrace(size_t size) : words_((size + 63) / 64, 0), size_(size) {}

BinTrace::BinTrace(std::initializer_list<int> bits) : BinTrace(bits.size()) {
    size_t t = 0;
    for (int b : bits) set(t++, b != 0);
}

BinTrace BinTrace::from_bits(std::span<const uint8_t> bits) {
    BinTrace out(bits.size());
    for (size_t t = 0; t < bits.size(); ++t)
        if (bits[t]) out.set(t, true);
    return out;
}

BinTrace BinTrace::from_words(std::vector<uint64_t> words, size_t size) {
    assert(words.size() == (size + 63) / 64);
    BinTrace out;
    out.words_ = std::move(words);
    out.size_ = size;
    return out;
}

void BinTrace::set(size_t t, bool value) {
    assert(t < size_);
    uint64_t mask = uint64_t{1} << (t & 63);
    if (value)
        words_[t >> 6] |= mask;
    else
        words_[t >> 6] &= ~mask;
}

size_t BinTrace::count() const {
    size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
}

uint64_t BinTrace::window64(int64_t start) const {
    // Funnel-shift two neighbouring words; words outside the trace read 0.
    int64_t wi = start >> 6;              // floor division
    unsigned off = static_cast<unsigned>(start - (wi << 6));
    int64_t nw = static_cast<int64_t>(words_.size());
    auto word = [&](int64_t i) -> uint64_t {
        return (i >= 0 && i < nw) ? words_[static_cast<size_t>(i)] : 0;
    };
    uint64_t lo = word(wi);
    if (off == 0) return lo;
    return (lo >> off) | (word(wi + 1) << (64 - off));
}

static uint64_t tail_mask(size_t size) {
    unsigned rem = size & 63;
    return rem ? (uint64_t{1} << rem) - 1 : ~uint64_t{0};
}

BinTrace implied(const BinTrace& trace, ImpliedKind kind) {
    if (trace.empty()) return BinTrace{};
    auto src = trace.words();
    // The packed forms below use prev(t) = f(t-1), realized per word as a
    // left shift with carry from the previous word. The first word's carry
    // is f(0) itself, which makes Rise(0) = Fall(0) = 0.
    uint64_t carry = src[0] & 1u;
    std::vector<uint64_t> words(src.size());
    for (size_t i = 0; i < src.size(); ++i) {
        uint64_t f = src[i];
        uint64_t prev = (f << 1) | carry;
        switch (kind) {
        case ImpliedKind::Level: words[i] = f; break;
        case ImpliedKind::Reflect: words[i] = ~f; break;
        case ImpliedKind::Rise: words[i] = f & ~prev; break;
        case ImpliedKind::Fall: words[i] = ~f & prev; break;
        }
        carry = f >> 63;
    }
    words.back() &= tail_mask(trace.size());
    return BinTrace::from_words(std::move(words), trace.size());
}

std::vector<uint64_t> extract_slice(const BinTrace& trace, int64_t start,
                                    size_t length) {
    std::vector<uint64_t> out((length + 63) / 64);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = trace.window64(start + static_cast<int64_t>(i) * 64);
    if (!out.empty()) out.back() &= tail_mask(length);
    return out;
}

size_t TraceSet::add(std::string name, BinTrace trace,
                     std::optional<std::string> group) {
    if (name.empty()) throw ConfigError("measurement name must be non-empty");
    if (find(name))
        throw ConfigError("duplicate measurement name: " + name);
    if (trace.size() == 0)
        throw ConfigError("measurement '" + name + "' has zero length");
    if (!ids_.empty() && trace.size() != cycles_)
        throw ConfigError("measurement '" + name + "' has length " +
                          std::to_string(trace.size()) + ", expected " +
                          std::to_string(cycles_));
    cycles_ = trace.size();
    size_t index = ids_.size();
    ids_.push_back(MeasurementId{index, std::move(name), std::move(group)});
    traces_.push_back(std::move(trace));
    return index;
}

std::optional<size_t> TraceSet::find(std::string_view name) const {
    for (const auto& id : ids_)
        if (id.name == name) return id.index;
    return std::nullopt;
}

} // namespace soclens
