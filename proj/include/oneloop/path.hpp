#pragma once

#include "oneloop/errors.hpp"
#include "oneloop/model.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oneloop {

/// Background orbit X(tau) sampled on a uniform euclidean-time lattice.
struct PathGrid {
    double tau0 = 0.0;
    double dtau = 1.0;
    std::vector<double> values;

    PathGrid() = default;

    PathGrid(double tau0_, double dtau_, std::vector<double> values_)
        : tau0(tau0_), dtau(dtau_), values(std::move(values_)) {
        if (!(dtau > 0.0) || !std::isfinite(dtau)) throw InvalidArgument("PathGrid: dtau must be positive");
        if (values.size() < 3) throw InvalidArgument("PathGrid: at least 3 points required");
    }

    std::size_t size() const noexcept { return values.size(); }
    double time(std::size_t i) const noexcept { return tau0 + dtau * static_cast<double>(i); }
    double horizon() const noexcept { return dtau * static_cast<double>(values.size() - 1); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// Samples `f` at n points spanning [tau_begin, tau_end].
inline PathGrid sample_path(const std::function<double(double)>& f, double tau_begin,
                            double tau_end, std::size_t n) {
    if (n < 3) throw InvalidArgument("sample_path: at least 3 points required");
    if (!(tau_end > tau_begin)) throw InvalidArgument("sample_path: empty time interval");
    const double h = (tau_end - tau_begin) / static_cast<double>(n - 1);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(tau_begin + h * static_cast<double>(i));
    return PathGrid(tau_begin, h, std::move(v));
}

/// Bump of height `amplitude` above `x0`, centred at tau = 0 on [-T/2, T/2]:
///   X(tau) = x0 + A (sech^2(s tau) - c) / (1 - c),   c = sech^2(s T / 2)
/// so that X = x0 exactly at both ends. `n` is the number of lattice points.
struct BumpShape {
    double x0 = 0.0;
    double amplitude = 1.0;
    double rate = 0.1;
    double horizon = 100.0;

    double floor() const {
        const double c = 1.0 / std::cosh(0.5 * rate * horizon);
        return c * c;
    }

    double operator()(double tau) const {
        const double c = floor();
        const double sech = 1.0 / std::cosh(rate * tau);
        return x0 + amplitude * (sech * sech - c) / (1.0 - c);
    }

    double velocity(double tau) const {
        const double c = floor();
        const double sech = 1.0 / std::cosh(rate * tau);
        return -2.0 * amplitude * rate * sech * sech * std::tanh(rate * tau) / (1.0 - c);
    }
};

inline PathGrid make_bump_path(const BumpShape& shape, std::size_t n) {
    if (!(shape.rate > 0.0) || !(shape.horizon > 0.0))
        throw InvalidArgument("bump path needs positive rate and horizon");
    PathGrid p = sample_path(shape, -0.5 * shape.horizon, 0.5 * shape.horizon, n);
    p.values.front() = shape.x0;
    p.values.back() = shape.x0;
    return p;
}

inline void check_path(const PathGrid& path, const Domain& domain) {
    for (double x : path.values) domain.check(x);
}

/// dX/dtau: central differences inside, second-order one-sided at the ends.
inline std::vector<double> path_velocity(const PathGrid& p) {
    const std::size_t n = p.size();
    const double h = p.dtau;
    std::vector<double> v(n);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (p[i + 1] - p[i - 1]) / (2.0 * h);
    v[0] = (4.0 * (p[1] - p[0]) - (p[2] - p[0])) / (2.0 * h);
    v[n - 1] = (4.0 * (p[n - 1] - p[n - 2]) - (p[n - 1] - p[n - 3])) / (2.0 * h);
    return v;
}

/// d^2X/dtau^2: central differences inside, second-order one-sided at the ends
/// (first-order when only 3 points exist).
inline std::vector<double> path_acceleration(const PathGrid& p) {
    const std::size_t n = p.size();
    const double h2 = p.dtau * p.dtau;
    std::vector<double> a(n);
    for (std::size_t i = 1; i + 1 < n; ++i) a[i] = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / h2;
    if (n >= 4) {
        a[0] = (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / h2;
        a[n - 1] = (2.0 * p[n - 1] - 5.0 * p[n - 2] + 4.0 * p[n - 3] - p[n - 4]) / h2;
    } else {
        a[0] = a[1];
        a[n - 1] = a[1];
    }
    return a;
}

inline double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

}  // namespace oneloop
