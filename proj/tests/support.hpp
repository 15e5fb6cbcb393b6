#pragma once

#include "oneloop/oneloop.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline oneloop::ModelSpec model(const std::string& m, const std::string& v, double hbar = 1.0,
                                oneloop::Domain d = {-10.0, 10.0}) {
    return oneloop::ModelSpec::parse(m, v, hbar, d);
}

inline oneloop::ModelSpec standard(double hbar = 1.0) { return model("1 + x^2", "0.5*x^2", hbar); }

/// Fourth-order central difference of f at x.
inline double fd1(const std::function<double(double)>& f, double x, double h = 1e-3) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

/// Fourth-order central second difference of f at x.
inline double fd2(const std::function<double(double)>& f, double x, double h = 1e-3) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

inline double rel(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    return v;
}

/// Five smooth model pairs with positive mass and Omega^2 bounded away from
/// zero on [-2, 2].
struct SmoothSpec {
    const char* mass;
    const char* potential;
};

inline const std::vector<SmoothSpec>& smooth_specs() {
    static const std::vector<SmoothSpec> specs{
        {"1 + x^2", "0.5*x^2 + 1"},
        {"exp(0.5*x)", "cosh(x)"},
        {"2 + sin(x)", "cosh(x)"},
        {"sqrt(1 + x^2)", "x^4/4 + x^2/2"},
        {"2 + tanh(x)", "exp(x) + x^2"},
    };
    return specs;
}

}  // namespace testing
