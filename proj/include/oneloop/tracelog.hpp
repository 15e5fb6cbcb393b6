#pragma once

// Exact one-loop trace-log on a finite horizon, relative to a constant
// reference frequency:
//
//   Gamma1 = 1/2 log det[-d^2 + Omega^2(tau)] / det[-d^2 + Omega0^2]
//
// with Dirichlet walls at both ends. Two independent evaluations are
// provided (Gelfand-Yaglom initial-value integration and the LDL^T pivots
// of the lattice operator), plus the two-term gradient-expansion prediction
// they are compared against.

#include "oneloop/effective.hpp"
#include "oneloop/errors.hpp"
#include "oneloop/model.hpp"
#include "oneloop/path.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace oneloop {

class EndpointMismatch : public DomainError {
public:
    using DomainError::DomainError;
};

/// Omega^2 sampled on a uniform time grid, with the constant reference Omega0^2.
struct FrequencyProfile {
    double tau0 = 0.0;
    double dtau = 1.0;
    std::vector<double> omega_sq;
    double omega0_sq = 1.0;

    FrequencyProfile() = default;

    FrequencyProfile(double tau0_, double dtau_, std::vector<double> values, double reference)
        : tau0(tau0_), dtau(dtau_), omega_sq(std::move(values)), omega0_sq(reference) {
        if (omega_sq.size() < 2) throw InvalidArgument("FrequencyProfile: at least 2 samples required");
        if (!(dtau > 0.0)) throw InvalidArgument("FrequencyProfile: non-positive horizon");
        if (!(omega0_sq > 0.0))
            throw NonPositiveFrequency("FrequencyProfile: reference Omega0^2 must be positive", 0.0);
    }

    std::size_t size() const noexcept { return omega_sq.size(); }
    double horizon() const noexcept { return dtau * static_cast<double>(omega_sq.size() - 1); }

    bool pinned(double tol = 1e-8) const {
        const double scale = std::max(1.0, omega0_sq);
        return std::abs(omega_sq.front() - omega0_sq) <= tol * scale &&
               std::abs(omega_sq.back() - omega0_sq) <= tol * scale;
    }
};

/// Omega^2(X(tau_i)) along a path.
inline FrequencyProfile profile_from_path(const ModelSpec& spec, const PathGrid& path,
                                          double omega0_sq) {
    std::vector<double> w2(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) w2[i] = omega_sq(spec, path[i]);
    return FrequencyProfile(path.tau0, path.dtau, std::move(w2), omega0_sq);
}

namespace detail {

inline constexpr double kRescaleThreshold = 1e150;

/// log y(T) for y'' = w2(tau) y, y(tau0) = 0, y'(tau0) = 1, by classical RK4
/// with Omega^2 linearly interpolated at half steps. The state is rescaled
/// whenever it exceeds kRescaleThreshold and the scale is carried in log form.
template <class Sample>
double gelfand_yaglom_log(std::size_t n, double h, Sample w2) {
    double y = 0.0, p = 1.0, log_scale = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = w2(i), b = w2(i + 1), mid = 0.5 * (a + b);
        const double k1y = p, k1p = a * y;
        const double k2y = p + 0.5 * h * k1p, k2p = mid * (y + 0.5 * h * k1y);
        const double k3y = p + 0.5 * h * k2p, k3p = mid * (y + 0.5 * h * k2y);
        const double k4y = p + h * k3p, k4p = b * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if (!(y > 0.0))
            throw NotPositiveDefinite("Gelfand-Yaglom solution vanished: Dirichlet operator is not positive",
                                      i + 1);
        const double s = std::max(std::abs(y), std::abs(p));
        if (s > kRescaleThreshold) {
            y /= s;
            p /= s;
            log_scale += std::log(s);
        }
    }
    return std::log(y) + log_scale;
}

}  // namespace detail

/// log[ y_Omega(T) / y_ref(T) ]: the Dirichlet log-determinant ratio.
inline double gy_logdet_ratio(const FrequencyProfile& profile) {
    if (!(profile.horizon() > 0.0)) throw InvalidArgument("gy_logdet_ratio: non-positive horizon");
    const auto& w2 = profile.omega_sq;
    const double ref = profile.omega0_sq;
    const double log_y = detail::gelfand_yaglom_log(w2.size(), profile.dtau,
                                                    [&](std::size_t i) { return w2[i]; });
    const double log_ref =
        detail::gelfand_yaglom_log(w2.size(), profile.dtau, [&](std::size_t) { return ref; });
    return log_y - log_ref;
}

/// Minimum number of grid points (walls included) for the lattice evaluation.
inline constexpr std::size_t kMinLatticeSize = 16;

/// sum log(lambda_i) - sum log(lambda0_i) for the lattice operators
/// -d^2 + Omega^2 and -d^2 + Omega0^2 on the interior points, from the LDL^T
/// pivots of the symmetric tridiagonal matrices (scaled by dtau^2).
inline double eig_logdet_ratio(const FrequencyProfile& profile) {
    if (profile.size() < kMinLatticeSize)
        throw InvalidArgument("eig_logdet_ratio: lattice needs at least " +
                              std::to_string(kMinLatticeSize) + " grid points");
    const std::size_t n = profile.size() - 2;
    const double h2 = profile.dtau * profile.dtau;
    const double ref_diag = 2.0 + h2 * profile.omega0_sq;
    double pivot = 0.0, ref_pivot = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diag = 2.0 + h2 * profile.omega_sq[i + 1];
        pivot = (i == 0) ? diag : diag - 1.0 / pivot;
        ref_pivot = (i == 0) ? ref_diag : ref_diag - 1.0 / ref_pivot;
        if (!(pivot > 0.0))
            throw NotPositiveDefinite("lattice operator -d^2 + Omega^2 is not positive definite", i);
        sum += std::log(pivot / ref_pivot);
    }
    return sum;
}

/// Gamma1 = 1/2 of the Gelfand-Yaglom log-determinant ratio.
inline double gamma1_numeric(const FrequencyProfile& profile) {
    return 0.5 * gy_logdet_ratio(profile);
}

/// Gamma1 from the lattice log-determinant ratio.
inline double gamma1_eigen(const FrequencyProfile& profile) {
    return 0.5 * eig_logdet_ratio(profile);
}

inline constexpr double kEndpointTolerance = 1e-8;

/// Two-term gradient expansion relative to the constant reference:
///   integral of (Omega(X) - Omega0)/2 + Z1(X) Xdot^2 / 2
/// The kinetic term can be switched off to measure its contribution.
inline double gamma1_expansion(const ModelSpec& spec, const PathGrid& path, double omega0_sq,
                               bool include_kinetic = true) {
    if (!(omega0_sq > 0.0)) throw NonPositiveFrequency("reference Omega0^2 must be positive", 0.0);
    check_path(path, spec.domain());
    const double scale = std::max(1.0, omega0_sq);
    for (double x_end : {path.values.front(), path.values.back()}) {
        const double w2 = omega_sq(spec, x_end);
        if (std::abs(w2 - omega0_sq) > kEndpointTolerance * scale)
            throw EndpointMismatch("path endpoint Omega^2 = " + detail::format_number(w2) +
                                   " differs from the reference " + detail::format_number(omega0_sq));
    }
    const double w0 = std::sqrt(omega0_sq);
    const auto xdot = path_velocity(path);
    std::vector<double> f(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double x = path[i];
        f[i] = 0.5 * (omega(spec, x) - w0);
        if (include_kinetic) f[i] += 0.5 * z1(spec, x) * xdot[i] * xdot[i];
    }
    return trapezoid(f, path.dtau);
}

/// 1/2 integral dk/2pi log[(k^2 + Omega^2)/(k^2 + Omega0^2)] by the tangent
/// substitution k = c tan(theta); the transformed integrand is smooth and
/// pi-periodic, so the midpoint rule converges geometrically.
inline double v1_momentum_check(double omega_sq_value, double omega0_sq, std::size_t nodes = 2048) {
    if (!(omega_sq_value > 0.0) || !(omega0_sq > 0.0))
        throw NonPositiveFrequency("momentum integral needs positive frequencies", 0.0);
    const double c = std::sqrt(std::sqrt(omega_sq_value * omega0_sq));
    const double c2 = c * c;
    const double half_pi = 0.5 * std::numbers::pi;
    const double dtheta = half_pi / static_cast<double>(nodes);
    double sum = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double theta = (static_cast<double>(j) + 0.5) * dtheta;
        const double s2 = std::sin(theta) * std::sin(theta);
        const double c2t = std::cos(theta) * std::cos(theta);
        // log[(c^2 s^2 + W c2t)/(c^2 s^2 + W0 c2t)] / c2t, written with log1p
        const double den = c2 * s2 + omega0_sq * c2t;
        sum += std::log1p((omega_sq_value - omega0_sq) * c2t / den) / c2t;
    }
    // dk = c sec^2 theta dtheta; the integrand is even, so double the half range.
    const double integral = 2.0 * c * sum * dtheta;
    return 0.5 * integral / (2.0 * std::numbers::pi);
}

}  // namespace oneloop
