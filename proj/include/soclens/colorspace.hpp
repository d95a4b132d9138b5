#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "soclens/errors.hpp"

namespace soclens {

struct Rgb8 {
    uint8_t red = 0;
    uint8_t green = 0;
    uint8_t blue = 0;

    bool operator==(const Rgb8&) const = default;

    std::string hex() const {
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", red, green, blue);
        return buf;
    }
};

/// Map a point of [0,1]^2 to an 8-bit colour. The radius from the origin
/// fades all channels together; the angle about the diagonal tilts green
/// (below) against blue (above), so equal inputs land on grey. Channels
/// take the floor, not the nearest integer.
inline Rgb8 map2d(double a, double b, double gamma = 1.0) {
    if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0))
        throw ConfigError("map2d inputs must lie in [0,1]");
    if (!(gamma > 0.0)) throw ConfigError("map2d gamma must be > 0");

    // radius may reach sqrt(2) in the corner region; the base never drops
    // below 0
    double base = std::max(0.0, 1.0 - std::sqrt(a * a + b * b) / std::sqrt(2.0));
    double theta = std::pow(base, gamma);
    // atan2 handles a = 0 as pi/2 and (0,0) as 0; the latter never shows
    // because theta = 1 there saturates all channels
    double phi = std::atan2(b, a);

    auto channel = [&](double exponent) {
        return static_cast<uint8_t>(std::floor(255.0 * std::pow(theta, exponent)));
    };
    Rgb8 rgb;
    rgb.red = channel(1.0);
    rgb.green = channel(std::max(0.0, M_PI / 4.0 - phi) + 1.0);
    rgb.blue = channel(std::max(0.0, phi - M_PI / 4.0) + 1.0);
    return rgb;
}

} // namespace soclens
