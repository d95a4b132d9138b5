#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "soclens/trace.hpp"

namespace soclens {

/// Windowed statistics for one ordered pair (x, y<delta>).
struct PairMetrics {
    double ex_x = 0.0;  // E[f_x], x unshifted
    double ex_y = 0.0;  // E[f_y<delta>]
    double ex_xy = 0.0; // E[f_x * f_y<delta>]
    double dep = 0.0;   // thresholded dependency, in [0,1]
    double cov = 0.0;   // thresholded scaled covariance, in [0,1]
    std::optional<double> cond_ex; // E[f_x|f_y]; empty when E[f_y] = 0
};

/// Build a window [u, v) with power-of-sine weights. Requires v - u >= 3
/// (smaller windows have no strictly positive weight for alpha > 0) and
/// alpha >= 0. Weights are computed for the first half and mirrored so the
/// symmetry w[k] = w[v-u-1-k] holds exactly.
WindowSpec window_weights(size_t u, size_t v, double alpha);

/// Weighted mean of the shifted trace over the window:
/// (1/sum w) * sum_k w[k] * f(u + k + delta), out-of-range samples 0.
double expectation(const BinTrace& trace, const WindowSpec& window,
                   int64_t delta = 0);

/// E[f_x|f_y] = E[f_x*f_y] / E[f_y]; empty when E[f_y] = 0.
std::optional<double> cond_expectation(double ex_xy, double ex_y);

/// Dependency measure: max(0, 1 - ex_x*ex_y/ex_xy), and 0 when ex_xy = 0
/// (the limit is -inf when the numerator is positive, and 0/0 carries no
/// evidence either way).
double dep(double ex_x, double ex_y, double ex_xy);

/// Scaled covariance: max(0, 4*(ex_xy - ex_x*ex_y)), clamped to [0,1].
double cov(double ex_x, double ex_y, double ex_xy);

/// All windowed statistics for the pair (x, y<delta>). x is evaluated
/// unshifted; y and the pointwise product carry the shift.
PairMetrics pair_metrics(const BinTrace& x, const BinTrace& y,
                         const WindowSpec& window, int64_t delta);

/// True iff both measures clear their thresholds strictly. The defaults
/// eps = 0 keep exactly the links with positive dependency and covariance.
inline bool significant(const PairMetrics& m, double eps_dep = 0.0,
                        double eps_cov = 0.0) {
    return m.dep > eps_dep && m.cov > eps_cov;
}

namespace detail {

/// Byte-sliced weight tables for fast weighted popcounts: entry [p][b] is
/// the sum of weights for the set bits of byte value b at byte offset p of
/// the window. Built once per (length, alpha) and shared by every pair and
/// shift evaluated under that window shape.
class WeightTable {
public:
    explicit WeightTable(std::span<const double> weights);

    /// sum_k w[k] * bit_k(words), blocked by byte with four fixed
    /// accumulators; result is independent of any outer parallel split.
    double weighted_sum(std::span<const uint64_t> words) const;

    /// Same, over the conjunction of two equal-length slices.
    double weighted_and_sum(std::span<const uint64_t> a,
                            std::span<const uint64_t> b) const;

    size_t length() const { return length_; }

private:
    size_t length_;
    std::vector<std::array<double, 256>> byte_sums_;
};

/// Straight weighted popcount in ascending-t order; adds weights for set
/// bits only, which matches a naive sample-by-sample loop bit for bit.
double weighted_sum_scalar(std::span<const uint64_t> words,
                           std::span<const double> weights);

} // namespace detail

} // namespace soclens
