#pragma once

// Derivative expansion of the one-loop effective action: effective potential
// V1 = Omega/2, kinetic coefficient Z1 = (Omega')^2 / (8 Omega^3), the
// corrected model (m + hbar Z1, V + hbar Omega/2), action values on paths and
// the adiabaticity diagnostic.

#include "oneloop/covariant.hpp"
#include "oneloop/errors.hpp"
#include "oneloop/model.hpp"
#include "oneloop/numeric.hpp"
#include "oneloop/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oneloop {

/// Omega = sqrt(Omega^2), or NonPositiveFrequency.
inline double omega(const ModelSpec& spec, double x) {
    const double w2 = omega_sq(spec, x);
    if (!(w2 > 0.0))
        throw NonPositiveFrequency(
            "Omega^2 = " + detail::format_number(w2) + " <= 0 at x = " + detail::format_number(x), x);
    return std::sqrt(w2);
}

inline double v1(const ModelSpec& spec, double x) { return 0.5 * omega(spec, x); }

/// dOmega/dx, from the structural derivative of sqrt(Omega^2).
inline double omega_slope(const ModelSpec& spec, double x) {
    omega(spec, x);
    return spec.geometry().omega.derivative(1, x);
}

/// d(Omega^2)/dx assembled by hand from m, m', m'', V', V'', V'''.
inline double omega_sq_slope(const ModelSpec& spec, double x) {
    const auto& mf = spec.mass();
    const auto& vf = spec.potential();
    const double m = detail::checked_mass(spec, x);
    const double m1 = mf.derivative(1, x), m2 = mf.derivative(2, x);
    const double v1_ = vf.derivative(1, x), v2 = vf.derivative(2, x), v3 = vf.derivative(3, x);
    return v3 / m - v2 * m1 / (m * m) - (m2 * v1_ + m1 * v2) / (2.0 * m * m) +
           m1 * m1 * v1_ / (m * m * m);
}

/// Z1 = (D Omega)^2 / (8 Omega^3).
inline double z1_gradient_form(const ModelSpec& spec, double x) {
    const double w = omega(spec, x);
    const double dw = spec.geometry().omega.derivative(1, x);
    return dw * dw / (8.0 * w * w * w);
}

/// Z1 = (D Omega^2)^2 / (32 Omega^5).
inline double z1_squared_form(const ModelSpec& spec, double x) {
    const double w = omega(spec, x);
    const double dw2 = omega_sq_slope(spec, x);
    return dw2 * dw2 / (32.0 * std::pow(w, 5));
}

inline constexpr double kZ1FormTolerance = 1e-10;

/// One-loop kinetic coefficient. Both closed forms are evaluated through
/// independent derivative routes and must agree.
inline double z1(const ModelSpec& spec, double x) {
    const double a = z1_gradient_form(spec, x);
    const double b = z1_squared_form(spec, x);
    if (relative_defect(a, b) > kZ1FormTolerance)
        throw InternalError("Z1 forms disagree at x = " + detail::format_number(x) + ": " +
                            detail::format_number(a) + " vs " + detail::format_number(b));
    return a;
}

/// m_eff = m + hbar Z1 and V_eff = V + hbar Omega / 2, held as expressions so
/// that their derivatives (needed by the effective equation of motion) are exact.
class EffectiveModel {
public:
    explicit EffectiveModel(const ModelSpec& spec) : source_(spec) {
        const auto& g = spec.geometry();
        const Expr& w = g.omega.expr(0);
        const Expr& dw = g.omega.expr(1);
        const Expr hbar = Expr::constant(spec.hbar());
        const Expr z1e = ipow(dw, 2) / (8.0 * ipow(w, 3));
        mass_ = Function1D(spec.mass().expr(0) + hbar * z1e, 1);
        potential_ = Function1D(spec.potential().expr(0) + hbar * (w / 2.0), 1);
    }

    const ModelSpec& source() const noexcept { return source_; }
    double hbar() const noexcept { return source_.hbar(); }
    const Domain& domain() const noexcept { return source_.domain(); }

    const Function1D& mass() const noexcept { return mass_; }
    const Function1D& potential() const noexcept { return potential_; }

    /// Throws NonPositiveFrequency where Omega^2 <= 0.
    void require_real_frequency(double x) const { omega(source_, x); }

    double mass_at(double x) const {
        require_real_frequency(x);
        return mass_(x);
    }

    double potential_at(double x) const {
        require_real_frequency(x);
        return potential_(x);
    }

private:
    ModelSpec source_;
    Function1D mass_;
    Function1D potential_;
};

inline EffectiveModel effective_model(const ModelSpec& spec) { return EffectiveModel(spec); }

struct ActionValue {
    double value = 0.0;
    double horizon = 0.0;
    double dtau = 0.0;
};

namespace detail {
inline double lagrangian(double m, double v, double xdot) { return 0.5 * m * xdot * xdot + v; }
}  // namespace detail

/// Trapezoid value of the integral of m(X) Xdot^2 / 2 + V(X).
inline ActionValue classical_action(const ModelSpec& spec, const PathGrid& path) {
    check_path(path, spec.domain());
    const auto xdot = path_velocity(path);
    std::vector<double> f(path.size());
    for (std::size_t i = 0; i < path.size(); ++i)
        f[i] = detail::lagrangian(spec.mass()(path[i]), spec.potential()(path[i]), xdot[i]);
    return {trapezoid(f, path.dtau), path.horizon(), path.dtau};
}

/// Same quadrature as classical_action with m_eff and V_eff.
inline ActionValue effective_action(const ModelSpec& spec, const PathGrid& path) {
    check_path(path, spec.domain());
    const auto xdot = path_velocity(path);
    const double hbar = spec.hbar();
    std::vector<double> f(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double x = path[i];
        const double m_eff = spec.mass()(x) + hbar * z1(spec, x);
        const double v_eff = spec.potential()(x) + hbar * v1(spec, x);
        f[i] = detail::lagrangian(m_eff, v_eff, xdot[i]);
    }
    return {trapezoid(f, path.dtau), path.horizon(), path.dtau};
}

struct AdiabaticityProfile {
    std::vector<double> epsilon;
    double max = 0.0;
};

/// eps(tau) = |dOmega/dtau| / Omega^2 with dOmega/dtau = Omega'(X) Xdot.
inline AdiabaticityProfile adiabaticity(const ModelSpec& spec, const PathGrid& path) {
    check_path(path, spec.domain());
    const auto xdot = path_velocity(path);
    AdiabaticityProfile out;
    out.epsilon.resize(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double w = omega(spec, path[i]);
        out.epsilon[i] = std::abs(omega_slope(spec, path[i]) * xdot[i]) / (w * w);
        out.max = std::max(out.max, out.epsilon[i]);
    }
    return out;
}

}  // namespace oneloop
