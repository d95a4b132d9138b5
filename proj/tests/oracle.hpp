// Independent naive reference implementations used by the unit and
// acceptance suites. Everything here works sample by sample on plain int
// vectors, with none of the packed-word machinery of the library, so the
// two routes share no code beyond the formulas themselves.
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "soclens/trace.hpp"

namespace oracle {

inline int sample(const std::vector<int>& f, long long t) {
    if (t < 0 || t >= static_cast<long long>(f.size())) return 0;
    return f[static_cast<size_t>(t)];
}

inline std::vector<int> implied(const std::vector<int>& f,
                                soclens::ImpliedKind kind) {
    std::vector<int> out(f.size(), 0);
    for (size_t t = 0; t < f.size(); ++t) {
        switch (kind) {
        case soclens::ImpliedKind::Level: out[t] = f[t]; break;
        case soclens::ImpliedKind::Reflect: out[t] = 1 - f[t]; break;
        case soclens::ImpliedKind::Rise:
            out[t] = t == 0 ? 0 : std::max(0, f[t] - f[t - 1]);
            break;
        case soclens::ImpliedKind::Fall:
            out[t] = t == 0 ? 0 : std::max(0, (1 - f[t]) - (1 - f[t - 1]));
            break;
        }
    }
    return out;
}

inline std::vector<double> weights(size_t n, double alpha) {
    std::vector<double> w(n);
    for (size_t k = 0; k < n; ++k)
        w[k] = std::pow(
            std::sin(static_cast<double>(k) * M_PI /
                     static_cast<double>(n - 1)),
            alpha);
    return w;
}

inline double expectation(const std::vector<int>& f, size_t u, size_t v,
                          double alpha, long long delta) {
    auto w = weights(v - u, alpha);
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < v - u; ++k) {
        num += w[k] * sample(f, static_cast<long long>(u + k) + delta);
        den += w[k];
    }
    return num / den;
}

struct PairResult {
    double ex_x = 0.0;
    double ex_y = 0.0;
    double ex_xy = 0.0;
    double raw_cov = 0.0; // unthresholded, unscaled ex_xy - ex_x*ex_y
    double dep = 0.0;
    double cov = 0.0;
    std::optional<double> cond_ex;
};

inline PairResult pair(const std::vector<int>& x, const std::vector<int>& y,
                       size_t u, size_t v, double alpha, long long delta) {
    auto w = weights(v - u, alpha);
    double den = 0.0, sx = 0.0, sy = 0.0, sxy = 0.0;
    for (size_t k = 0; k < v - u; ++k) {
        long long t = static_cast<long long>(u + k);
        int xv = sample(x, t);
        int yv = sample(y, t + delta);
        den += w[k];
        sx += w[k] * xv;
        sy += w[k] * yv;
        sxy += w[k] * xv * yv;
    }
    PairResult r;
    r.ex_x = sx / den;
    r.ex_y = sy / den;
    r.ex_xy = sxy / den;
    r.raw_cov = r.ex_xy - r.ex_x * r.ex_y;
    r.dep = r.ex_xy == 0.0
                ? 0.0
                : std::max(0.0, 1.0 - (r.ex_x * r.ex_y) / r.ex_xy);
    r.cov = std::max(0.0, 4.0 * r.raw_cov);
    if (r.ex_y != 0.0) r.cond_ex = r.ex_xy / r.ex_y;
    return r;
}

// --- helpers shared by the test suites ------------------------------------

inline std::vector<int> random_trace(size_t n, double density,
                                     uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bit(density);
    std::vector<int> out(n);
    for (auto& v : out) v = bit(rng) ? 1 : 0;
    return out;
}

inline soclens::BinTrace to_bintrace(const std::vector<int>& bits) {
    soclens::BinTrace out(bits.size());
    for (size_t t = 0; t < bits.size(); ++t)
        if (bits[t]) out.set(t, true);
    return out;
}

inline std::vector<int> to_vector(const soclens::BinTrace& trace) {
    std::vector<int> out(trace.size());
    for (size_t t = 0; t < trace.size(); ++t) out[t] = trace.bit(t) ? 1 : 0;
    return out;
}

} // namespace oracle
