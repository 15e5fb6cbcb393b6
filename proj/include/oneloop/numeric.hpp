#pragma once

#include "oneloop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace oneloop {

/// |a - b| / max(|a|, |b|, floor). The floor keeps the ratio defined where
/// both values vanish.
inline double relative_defect(double a, double b, double floor = 1e-14) {
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    return std::abs(a - b) / scale;
}

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidArgument("log_log_slope needs at least two paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oneloop
