#pragma once

// Euclidean equations of motion of the classical action and of the one-loop
// effective action, integrated as initial-value problems.

#include "oneloop/effective.hpp"
#include "oneloop/errors.hpp"
#include "oneloop/model.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

namespace oneloop {

/// Anything with a metric, a potential and a domain: ModelSpec or EffectiveModel.
template <class M>
concept MotionModel = requires(const M& m) {
    { m.mass() } -> std::convertible_to<const Function1D&>;
    { m.potential() } -> std::convertible_to<const Function1D&>;
    { m.domain() } -> std::convertible_to<const Domain&>;
};

struct OrbitState {
    double tau = 0.0;
    double x = 0.0;
    double xdot = 0.0;
};

struct Trajectory {
    std::vector<OrbitState> states;
    double dtau = 0.0;
    bool used_effective = false;
    /// max |EL residual| / dtau^4 over states with two neighbours on each side.
    double residual_constant = 0.0;
};

/// The orbit left the configuration domain; `partial` holds the states up to
/// the last one inside.
class DomainExit : public DomainError {
public:
    DomainExit(const std::string& what, double tau, Trajectory partial)
        : DomainError(what), tau_(tau), partial_(std::move(partial)) {}
    double exit_tau() const noexcept { return tau_; }
    const Trajectory& partial() const noexcept { return partial_; }

private:
    double tau_;
    Trajectory partial_;
};

namespace detail {
template <MotionModel M>
void guard_point(const M& model, double x) {
    model.domain().check(x);
    if constexpr (requires { model.require_real_frequency(x); }) model.require_real_frequency(x);
}
}  // namespace detail

/// Euclidean acceleration Xddot = [V'(X) - m'(X) Xdot^2 / 2] / m(X).
template <MotionModel M>
double el_rhs(const M& model, double x, double xdot) {
    detail::guard_point(model, x);
    const double m = model.mass()(x);
    if (!(m > 0.0)) throw DomainError("non-positive mass at x = " + detail::format_number(x));
    return (model.potential().derivative(1, x) - 0.5 * model.mass().derivative(1, x) * xdot * xdot) / m;
}

/// V' - m' Xdot^2 / 2 - m Xddot for either model.
template <MotionModel M>
double motion_residual(const M& model, double x, double xdot, double xddot) {
    return model.potential().derivative(1, x) - 0.5 * model.mass().derivative(1, x) * xdot * xdot -
           model.mass()(x) * xddot;
}

/// Euclidean first integral E = m Xdot^2 / 2 - V.
template <MotionModel M>
double euclidean_energy(const M& model, const OrbitState& s) {
    return 0.5 * model.mass()(s.x) * s.xdot * s.xdot - model.potential()(s.x);
}

namespace detail {
template <MotionModel M>
double residual_constant(const M& model, const std::vector<OrbitState>& st, double h) {
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < st.size(); ++i) {
        const double xddot = (-st[i + 2].x + 16.0 * st[i + 1].x - 30.0 * st[i].x +
                              16.0 * st[i - 1].x - st[i - 2].x) / (12.0 * h * h);
        worst = std::max(worst, std::abs(motion_residual(model, st[i].x, st[i].xdot, xddot)));
    }
    return worst / (h * h * h * h);
}
}  // namespace detail

/// Fixed-step RK4 integration of (X, Xdot) over [start.tau, start.tau + T].
/// Throws DomainExit if the orbit leaves the domain.
template <MotionModel M>
Trajectory integrate_orbit(const M& model, const OrbitState& start, double T, double dtau) {
    if (!(dtau > 0.0)) throw InvalidArgument("integrate_orbit: dtau must be positive");
    if (!(T >= dtau)) throw InvalidArgument("integrate_orbit: T must be at least dtau");
    const auto steps = static_cast<std::size_t>(std::llround(T / dtau));

    Trajectory traj;
    traj.dtau = dtau;
    if constexpr (requires { model.require_real_frequency(0.0); }) traj.used_effective = true;
    detail::guard_point(model, start.x);
    traj.states.reserve(steps + 1);
    traj.states.push_back(start);

    auto fail = [&](double tau, const std::string& why) {
        traj.residual_constant = detail::residual_constant(model, traj.states, dtau);
        throw DomainExit("orbit left the domain at tau = " + detail::format_number(tau) + ": " + why,
                         tau, traj);
    };

    double x = start.x, v = start.xdot;
    const double h = dtau;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double tau = start.tau + static_cast<double>(k - 1) * h;
        try {
            const double k1x = v, k1v = el_rhs(model, x, v);
            const double k2x = v + 0.5 * h * k1v, k2v = el_rhs(model, x + 0.5 * h * k1x, k2x);
            const double k3x = v + 0.5 * h * k2v, k3v = el_rhs(model, x + 0.5 * h * k2x, k3x);
            const double k4x = v + h * k3v, k4v = el_rhs(model, x + h * k3x, k4x);
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        } catch (const NonPositiveFrequency&) {
            throw;
        } catch (const DomainError& e) {
            fail(tau, e.what());
        }
        if (!model.domain().contains(x) || !std::isfinite(x) || !std::isfinite(v))
            fail(start.tau + static_cast<double>(k) * h, "state outside domain");
        traj.states.push_back({start.tau + static_cast<double>(k) * h, x, v});
    }
    traj.residual_constant = detail::residual_constant(model, traj.states, dtau);
    return traj;
}

struct QuantumShift {
    Trajectory classical;
    Trajectory effective;
    double max_deviation = 0.0;
};

/// Integrates the same initial state under the classical and the effective
/// model and reports max |x_eff(tau) - x_cl(tau)|.
inline QuantumShift quantum_shift(const ModelSpec& spec, const OrbitState& start, double T,
                                  double dtau) {
    QuantumShift out;
    out.classical = integrate_orbit(spec, start, T, dtau);
    for (const auto& s : out.classical.states) omega(spec, s.x);
    out.effective = integrate_orbit(effective_model(spec), start, T, dtau);
    for (std::size_t i = 0; i < out.classical.states.size(); ++i)
        out.max_deviation = std::max(
            out.max_deviation, std::abs(out.effective.states[i].x - out.classical.states[i].x));
    return out;
}

}  // namespace oneloop
