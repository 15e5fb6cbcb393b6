#pragma once

// Coordinate changes x = x(y) and executable covariance checks: V and Omega^2
// transform as scalars, m and Z1 as rank-2 tensors, and action values are
// chart independent.

#include "oneloop/effective.hpp"
#include "oneloop/errors.hpp"
#include "oneloop/model.hpp"
#include "oneloop/numeric.hpp"
#include "oneloop/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace oneloop {

class NonMonotoneMap : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Strictly monotone map x = x(y) on a closed y-interval.
class CoordinateMap {
public:
    CoordinateMap(Function1D forward, Domain y_domain, std::size_t samples = 1001)
        : forward_(std::move(forward)), y_domain_(y_domain) {
        if (forward_.max_order() < 3) throw InvalidArgument("coordinate map needs derivatives up to order 3");
        if (!(y_domain_.lo < y_domain_.hi)) throw InvalidArgument("map y-domain requires lo < hi");
        if (samples < 2) samples = 2;
        for (std::size_t i = 0; i < samples; ++i) {
            const double y = y_domain_.lo + y_domain_.width() * static_cast<double>(i) / (samples - 1);
            const double j = forward_.derivative(1, y);
            if (!(std::abs(j) > 1e-12))
                throw NonMonotoneMap("map derivative vanishes at y = " + detail::format_number(y) +
                                     ": non-monotone map");
            const int sign = j > 0.0 ? 1 : -1;
            if (direction_ == 0)
                direction_ = sign;
            else if (sign != direction_)
                throw NonMonotoneMap("map derivative changes sign near y = " + detail::format_number(y) +
                                     ": non-monotone map");
        }
    }

    /// Parses `source` as an expression in the variable `y`.
    static CoordinateMap parse(std::string_view source, Domain y_domain) {
        return CoordinateMap(Function1D::parse(source, "y"), y_domain);
    }

    double operator()(double y) const { return forward_(y); }
    double jacobian(double y) const { return forward_.derivative(1, y); }
    const Function1D& forward() const noexcept { return forward_; }
    const Domain& y_domain() const noexcept { return y_domain_; }
    int direction() const noexcept { return direction_; }

    Domain image() const {
        const double a = forward_(y_domain_.lo), b = forward_(y_domain_.hi);
        return {std::min(a, b), std::max(a, b)};
    }

    /// y with x(y) = x, by bisection down to floating-point resolution.
    double inverse(double x) const {
        const Domain img = image();
        if (!img.contains(x))
            throw DomainError("value " + detail::format_number(x) + " outside the map image");
        double lo = y_domain_.lo, hi = y_domain_.hi;
        // g(y) = direction * (x(y) - x) is increasing
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (direction_ * (forward_(mid) - x) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double glo = std::abs(forward_(lo) - x), ghi = std::abs(forward_(hi) - x);
        return glo <= ghi ? lo : hi;
    }

private:
    Function1D forward_;
    Domain y_domain_;
    int direction_ = 0;
};

/// x = outer(inner(z)) on inner's domain.
inline CoordinateMap compose(const CoordinateMap& outer, const CoordinateMap& inner) {
    return CoordinateMap(Function1D(substitute(outer.forward().expr(0), inner.forward().expr(0))),
                         inner.y_domain());
}

/// The model in y-coordinates: V~(y) = V(x(y)), m~(y) = m(x(y)) x'(y)^2.
inline ModelSpec pushforward_model(const ModelSpec& spec, const CoordinateMap& map) {
    const Domain img = map.image();
    if (!spec.domain().contains(img.lo) || !spec.domain().contains(img.hi))
        throw DomainError("map image [" + detail::format_number(img.lo) + ", " +
                          detail::format_number(img.hi) + "] leaves the model domain");
    const Expr& fwd = map.forward().expr(0);
    const Expr& jac = map.forward().expr(1);
    Expr mass = substitute(spec.mass().expr(0), fwd) * ipow(jac, 2);
    Expr potential = substitute(spec.potential().expr(0), fwd);
    return ModelSpec(Function1D(std::move(mass)), Function1D(std::move(potential)), spec.hbar(),
                     map.y_domain());
}

inline PathGrid pushforward_path(const PathGrid& path, const CoordinateMap& map) {
    std::vector<double> y(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) y[i] = map.inverse(path[i]);
    return PathGrid(path.tau0, path.dtau, std::move(y));
}

struct InvarianceReport {
    double max_defect = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
    std::size_t skipped = 0;

    bool passed() const noexcept { return max_defect <= tolerance; }
};

inline constexpr double kAnalyticTolerance = 1e-9;
inline constexpr double kActionTolerance = 1e-6;

namespace detail {
inline std::vector<double> sample_points(const Domain& d, std::size_t samples) {
    if (samples < 2) throw InvalidArgument("need at least 2 samples");
    std::vector<double> y(samples);
    for (std::size_t i = 0; i < samples; ++i)
        y[i] = (i + 1 == samples) ? d.hi : d.lo + d.width() * static_cast<double>(i) / (samples - 1);
    return y;
}
}  // namespace detail

/// Omega~^2(y) = Omega^2(x(y)) and V1~(y) = V1(x(y)). V1 is skipped where
/// Omega^2 <= 0.
inline InvarianceReport check_scalar(const ModelSpec& spec, const CoordinateMap& map,
                                     std::size_t samples) {
    const ModelSpec pulled = pushforward_model(spec, map);
    InvarianceReport r{0.0, kAnalyticTolerance, samples, 0};
    for (double y : detail::sample_points(map.y_domain(), samples)) {
        const double x = map(y);
        const double w2x = omega_sq(spec, x);
        const double w2y = omega_sq(pulled, y);
        r.max_defect = std::max(r.max_defect, relative_defect(w2y, w2x));
        if (w2x > 0.0 && w2y > 0.0)
            r.max_defect = std::max(r.max_defect, relative_defect(v1(pulled, y), v1(spec, x)));
        else
            ++r.skipped;
    }
    return r;
}

/// m_eff~(y) = m_eff(x(y)) x'(y)^2 and Z1~(y) = Z1(x(y)) x'(y)^2.
inline InvarianceReport check_tensor(const ModelSpec& spec, const CoordinateMap& map,
                                     std::size_t samples) {
    const ModelSpec pulled = pushforward_model(spec, map);
    InvarianceReport r{0.0, kAnalyticTolerance, samples, 0};
    const double hbar = spec.hbar();
    for (double y : detail::sample_points(map.y_domain(), samples)) {
        const double x = map(y);
        const double j2 = map.jacobian(y) * map.jacobian(y);
        const double z1x = z1(spec, x), z1y = z1(pulled, y);
        const double meff_x = spec.mass()(x) + hbar * z1x;
        const double meff_y = pulled.mass()(y) + hbar * z1y;
        r.max_defect = std::max(r.max_defect, relative_defect(meff_y, meff_x * j2));
        r.max_defect = std::max(r.max_defect, relative_defect(z1y, z1x * j2));
    }
    return r;
}

struct ActionInvarianceReport {
    double classical_x = 0.0;
    double classical_y = 0.0;
    double effective_x = 0.0;
    double effective_y = 0.0;
    double max_defect = 0.0;
    double tolerance = kActionTolerance;

    bool passed() const noexcept { return max_defect <= tolerance; }
};

/// Classical and effective action of `path` in the x-chart against the same
/// quantities of the pulled-back path in the y-chart.
inline ActionInvarianceReport check_action_invariance(const ModelSpec& spec, const CoordinateMap& map,
                                                      const PathGrid& path, double hbar) {
    const ModelSpec sx = spec.with_hbar(hbar);
    const ModelSpec sy = pushforward_model(sx, map);
    const PathGrid py = pushforward_path(path, map);
    ActionInvarianceReport r;
    r.classical_x = classical_action(sx, path).value;
    r.classical_y = classical_action(sy, py).value;
    r.effective_x = effective_action(sx, path).value;
    r.effective_y = effective_action(sy, py).value;
    r.max_defect = std::max(relative_defect(r.classical_y, r.classical_x),
                            relative_defect(r.effective_y, r.effective_x));
    return r;
}

}  // namespace oneloop
