#include "soclens/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "soclens/errors.hpp"

namespace soclens {

WindowSpec window_weights(size_t u, size_t v, double alpha) {
    if (v <= u || v - u < 3)
        throw ConfigError("window too small: need v - u >= 3, got [" +
                          std::to_string(u) + ", " + std::to_string(v) + ")");
    if (alpha < 0.0)
        throw ConfigError("window exponent alpha must be >= 0");

    size_t n = v - u;
    auto weights = std::make_shared<std::vector<double>>(n);
    // sin(k*pi/(n-1)) over the first half, mirrored onto the second half so
    // w[k] == w[n-1-k] exactly. alpha = 0 yields all-ones (0^0 = 1).
    for (size_t k = 0; k <= (n - 1) / 2; ++k) {
        double s = std::sin(static_cast<double>(k) * M_PI /
                            static_cast<double>(n - 1));
        double w = std::pow(std::max(0.0, s), alpha);
        (*weights)[k] = w;
        (*weights)[n - 1 - k] = w;
    }
    double sum = 0.0;
    for (double w : *weights) sum += w;

    WindowSpec spec;
    spec.u = u;
    spec.v = v;
    spec.alpha = alpha;
    spec.weights = std::move(weights);
    spec.weight_sum = sum;
    return spec;
}

namespace detail {

double weighted_sum_scalar(std::span<const uint64_t> words,
                           std::span<const double> weights) {
    double sum = 0.0;
    size_t n = weights.size();
    for (size_t i = 0; i < words.size(); ++i) {
        uint64_t w = words[i];
        size_t base = i * 64;
        for (; w; w &= w - 1) {
            size_t k = base + static_cast<unsigned>(std::countr_zero(w));
            if (k >= n) break;
            sum += weights[k];
        }
    }
    return sum;
}

WeightTable::WeightTable(std::span<const double> weights)
    : length_(weights.size()), byte_sums_((weights.size() + 7) / 8) {
    for (size_t p = 0; p < byte_sums_.size(); ++p) {
        auto& table = byte_sums_[p];
        table[0] = 0.0;
        for (unsigned b = 1; b < 256; ++b) {
            unsigned low = b & (b - 1); // b with its lowest set bit cleared
            size_t k = p * 8 + static_cast<unsigned>(std::countr_zero(b));
            table[b] = table[low] + (k < length_ ? weights[k] : 0.0);
        }
    }
}

double WeightTable::weighted_sum(std::span<const uint64_t> words) const {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    size_t nb = byte_sums_.size();
    for (size_t i = 0; i < words.size(); ++i) {
        uint64_t w = words[i];
        size_t p = i * 8;
        if (p + 8 <= nb) {
            acc0 += byte_sums_[p + 0][w & 0xff];
            acc1 += byte_sums_[p + 1][(w >> 8) & 0xff];
            acc2 += byte_sums_[p + 2][(w >> 16) & 0xff];
            acc3 += byte_sums_[p + 3][(w >> 24) & 0xff];
            acc0 += byte_sums_[p + 4][(w >> 32) & 0xff];
            acc1 += byte_sums_[p + 5][(w >> 40) & 0xff];
            acc2 += byte_sums_[p + 6][(w >> 48) & 0xff];
            acc3 += byte_sums_[p + 7][(w >> 56) & 0xff];
        } else {
            for (size_t j = 0; p + j < nb; ++j)
                acc0 += byte_sums_[p + j][(w >> (8 * j)) & 0xff];
        }
    }
    return (acc0 + acc1) + (acc2 + acc3);
}

double WeightTable::weighted_and_sum(std::span<const uint64_t> a,
                                     std::span<const uint64_t> b) const {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    size_t nb = byte_sums_.size();
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        uint64_t w = a[i] & b[i];
        size_t p = i * 8;
        if (p + 8 <= nb) {
            acc0 += byte_sums_[p + 0][w & 0xff];
            acc1 += byte_sums_[p + 1][(w >> 8) & 0xff];
            acc2 += byte_sums_[p + 2][(w >> 16) & 0xff];
            acc3 += byte_sums_[p + 3][(w >> 24) & 0xff];
            acc0 += byte_sums_[p + 4][(w >> 32) & 0xff];
            acc1 += byte_sums_[p + 5][(w >> 40) & 0xff];
            acc2 += byte_sums_[p + 6][(w >> 48) & 0xff];
            acc3 += byte_sums_[p + 7][(w >> 56) & 0xff];
        } else {
            for (size_t j = 0; p + j < nb; ++j)
                acc0 += byte_sums_[p + j][(w >> (8 * j)) & 0xff];
        }
    }
    return (acc0 + acc1) + (acc2 + acc3);
}

} // namespace detail

double expectation(const BinTrace& trace, const WindowSpec& window,
                   int64_t delta) {
    auto slice = extract_slice(
        trace, static_cast<int64_t>(window.u) + delta, window.length());
    return detail::weighted_sum_scalar(slice, *window.weights) /
           window.weight_sum;
}

std::optional<double> cond_expectation(double ex_xy, double ex_y) {
    if (ex_y == 0.0) return std::nullopt;
    return std::min(1.0, ex_xy / ex_y);
}

double dep(double ex_x, double ex_y, double ex_xy) {
    if (ex_xy == 0.0) return 0.0;
    double phi = 1.0 - (ex_x * ex_y) / ex_xy;
    return std::max(0.0, phi);
}

double cov(double ex_x, double ex_y, double ex_xy) {
    double phi = 4.0 * (ex_xy - ex_x * ex_y);
    return std::clamp(phi, 0.0, 1.0);
}

PairMetrics pair_metrics(const BinTrace& x, const BinTrace& y,
                         const WindowSpec& window, int64_t delta) {
    size_t n = window.length();
    auto sx = extract_slice(x, static_cast<int64_t>(window.u), n);
    auto sy = extract_slice(y, static_cast<int64_t>(window.u) + delta, n);
    std::vector<uint64_t> sxy(sx.size());
    for (size_t i = 0; i < sx.size(); ++i) sxy[i] = sx[i] & sy[i];

    PairMetrics m;
    const auto& w = *window.weights;
    m.ex_x = detail::weighted_sum_scalar(sx, w) / window.weight_sum;
    m.ex_y = detail::weighted_sum_scalar(sy, w) / window.weight_sum;
    m.ex_xy = detail::weighted_sum_scalar(sxy, w) / window.weight_sum;
    m.dep = dep(m.ex_x, m.ex_y, m.ex_xy);
    m.cov = cov(m.ex_x, m.ex_y, m.ex_xy);
    m.cond_ex = cond_expectation(m.ex_xy, m.ex_y);
    return m;
}

} // namespace soclens
