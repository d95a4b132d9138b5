#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace soclens {

/// One named binary measurement within a TraceSet.
struct MeasurementId {
    size_t index = 0;                 // unique within the owning TraceSet
    std::string name;                 // hierarchical, e.g. "slave.busy"
    std::optional<std::string> group; // optional cluster label for layout
};

/// The four derived forms of a binary measurement. Ordering is fixed so
/// iteration over kinds is deterministic everywhere.
enum class ImpliedKind : uint8_t {
    Level = 0,   // f(t)
    Reflect = 1, // 1 - f(t)
    Rise = 2,    // max(0, f(t) - f(t-1)), 0 at t = 0
    Fall = 3,    // max(0, (1-f)(t) - (1-f)(t-1)), 0 at t = 0
};

inline constexpr ImpliedKind kAllKinds[4] = {
    ImpliedKind::Level, ImpliedKind::Reflect, ImpliedKind::Rise,
    ImpliedKind::Fall};

const char* to_string(ImpliedKind kind);
std::optional<ImpliedKind> kind_from_string(std::string_view name);

/// Dense binary timeline over cycles [0, T), stored as packed 64-bit words
/// (bit t lives in word t/64 at position t%64). Treated as immutable once
/// filled; traces can reach 1e7+ cycles so all bulk statistics operate on
/// whole words.
class BinTrace {
public:
    BinTrace() = default;
    explicit BinTrace(size_t size);
    BinTrace(std::initializer_list<int> bits);

    static BinTrace from_bits(std::span<const uint8_t> bits);
    /// Adopt packed words; bits at and beyond `size` must be zero.
    static BinTrace from_words(std::vector<uint64_t> words, size_t size);

    size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool bit(size_t t) const {
        return (words_[t >> 6] >> (t & 63)) & 1u;
    }
    void set(size_t t, bool value);

    std::span<const uint64_t> words() const { return words_; }
    size_t word_count() const { return words_.size(); }

    /// Number of set bits over the whole trace.
    size_t count() const;

    /// 64 bits starting at signed bit offset `start`; positions outside
    /// [0, T) read as 0 (quiescent outside the record).
    uint64_t window64(int64_t start) const;

    bool operator==(const BinTrace& other) const = default;

private:
    std::vector<uint64_t> words_;
    size_t size_ = 0;
};

/// Sample trace value at t + delta; 0 whenever t + delta falls outside the
/// recorded range.
inline int shifted_sample(const BinTrace& trace, size_t t, int64_t delta) {
    int64_t pos = static_cast<int64_t>(t) + delta;
    if (pos < 0 || pos >= static_cast<int64_t>(trace.size())) return 0;
    return trace.bit(static_cast<size_t>(pos)) ? 1 : 0;
}

/// Derive one of the four implied measurements. Same length as the input;
/// Rise and Fall are defined as 0 at t = 0 (no phantom edge from the
/// pre-record state).
BinTrace implied(const BinTrace& trace, ImpliedKind kind);

/// Extract `length` bits starting at signed bit offset `start` into packed
/// words; out-of-range positions are 0 and the tail of the last word is
/// cleared.
std::vector<uint64_t> extract_slice(const BinTrace& trace, int64_t start,
                                    size_t length);

/// Half-open analysis window [u, v) with power-of-sine weights
/// w[k] = sin^alpha(k*pi/(v-u-1)) for the window-local offset k. alpha = 0
/// selects the rectangular window (all weights 1, adopting 0^0 = 1 at the
/// endpoints). Weights are precomputed once and shared between windows of
/// equal length.
struct WindowSpec {
    size_t u = 0; // start cycle, inclusive
    size_t v = 0; // end cycle, exclusive
    double alpha = 2.0;
    std::shared_ptr<const std::vector<double>> weights;
    double weight_sum = 0.0;

    size_t length() const { return v - u; }
};

/// A set of equal-length measurements plus optional physical-time metadata.
class TraceSet {
public:
    TraceSet() = default;

    /// Append a measurement. Name must be unique; all traces must share the
    /// same length. Throws ConfigError otherwise.
    size_t add(std::string name, BinTrace trace,
               std::optional<std::string> group = std::nullopt);

    size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    size_t cycles() const { return cycles_; }

    const MeasurementId& id(size_t i) const { return ids_[i]; }
    const BinTrace& trace(size_t i) const { return traces_[i]; }
    const std::vector<MeasurementId>& ids() const { return ids_; }

    std::optional<size_t> find(std::string_view name) const;

    std::optional<std::string> timescale; // e.g. "1ns"; metadata only

private:
    std::vector<MeasurementId> ids_;
    std::vector<BinTrace> traces_;
    size_t cycles_ = 0;
};

} // namespace soclens
