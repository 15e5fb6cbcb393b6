#pragma once

// Covariant geometry of the one-dimensional metric m(x): connection, einbein,
// covariant frequency, Euler-Lagrange residual and the lattice fluctuation
// kernels around a background path.

#include "oneloop/errors.hpp"
#include "oneloop/model.hpp"
#include "oneloop/path.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace oneloop {

namespace detail {
inline double checked_mass(const ModelSpec& spec, double x) {
    spec.domain().check(x);
    const double m = spec.mass()(x);
    if (!(m > 0.0))
        throw DomainError("non-positive mass m(" + format_number(x) + ") = " + format_number(m));
    return m;
}
}  // namespace detail

/// gamma(x) = m'(x) / (2 m(x)).
inline double christoffel(const ModelSpec& spec, double x) {
    const double m = detail::checked_mass(spec, x);
    return spec.mass().derivative(1, x) / (2.0 * m);
}

/// h(x) = sqrt(m(x)).
inline double einbein(const ModelSpec& spec, double x) {
    return std::sqrt(detail::checked_mass(spec, x));
}

/// D_x h = h'(x) - gamma(x) h(x), with h' taken structurally from sqrt(m).
/// Vanishes identically.
inline double einbein_covariant_derivative(const ModelSpec& spec, double x) {
    const double gamma = christoffel(spec, x);
    const auto& h = spec.geometry().einbein;
    return h.derivative(1, x) - gamma * h(x);
}

/// Omega^2 = (V'' - gamma V') / m.  May be zero or negative.
inline double omega_sq(const ModelSpec& spec, double x) {
    const double m = detail::checked_mass(spec, x);
    const double gamma = spec.mass().derivative(1, x) / (2.0 * m);
    const auto& v = spec.potential();
    return (v.derivative(2, x) - gamma * v.derivative(1, x)) / m;
}

/// Omega^2 in Laplace-Beltrami form m^{-1/2} d/dx [ sqrt(m) V'/m ], with the
/// outer derivative taken structurally.
inline double omega_sq_lb(const ModelSpec& spec, double x) {
    const double m = detail::checked_mass(spec, x);
    return spec.geometry().lb_flux.derivative(1, x) / std::sqrt(m);
}

/// Euler-Lagrange residual V' - m' xdot^2 / 2 - m xddot (zero on classical orbits).
inline double el_residual(const ModelSpec& spec, double x, double xdot, double xddot) {
    spec.domain().check(x);
    return spec.potential().derivative(1, x) - 0.5 * spec.mass().derivative(1, x) * xdot * xdot -
           spec.mass()(x) * xddot;
}

/// Symmetric tridiagonal operator on the interior lattice points of a path
/// (Dirichlet boundaries).
struct KernelMatrix {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;  // size n-1; (i, i+1) == (i+1, i)
    double dtau = 1.0;

    std::size_t size() const noexcept { return diagonal.size(); }

    Eigen::MatrixXd dense() const {
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) k(i, i) = diagonal[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            k(i, i + 1) = off_diagonal[static_cast<std::size_t>(i)];
            k(i + 1, i) = off_diagonal[static_cast<std::size_t>(i)];
        }
        return k;
    }

    /// All eigenvalues, ascending.
    std::vector<double> eigenvalues() const {
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diagonal.data(), n);
        Eigen::VectorXd e = n > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
                                        off_diagonal.data(), n - 1))
                                  : Eigen::VectorXd(0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw InternalError("tridiagonal eigensolver failed");
        const Eigen::VectorXd& ev = solver.eigenvalues();
        return {ev.data(), ev.data() + ev.size()};
    }
};

namespace detail {

struct LinkTerms {
    double mass;
    double slope;      // m'(mid)
    double curvature;  // m''(mid)
    double velocity;   // (X_{j+1} - X_j) / h
};

inline std::vector<LinkTerms> link_terms(const ModelSpec& spec, const PathGrid& path) {
    std::vector<LinkTerms> links(path.size() - 1);
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        const double mid = 0.5 * (path[j] + path[j + 1]);
        links[j] = {spec.mass()(mid), spec.mass().derivative(1, mid),
                    spec.mass().derivative(2, mid), (path[j + 1] - path[j]) / path.dtau};
    }
    return links;
}

inline void check_kernel_path(const ModelSpec& spec, const PathGrid& path) {
    if (path.size() < 3) throw InvalidArgument("kernel needs at least 3 path points");
    for (double x : path.values) checked_mass(spec, x);
}

}  // namespace detail

/// Lattice classical action
///   S = sum_links m((X_j + X_{j+1})/2) (X_{j+1} - X_j)^2 / (2 dtau)
///     + dtau * trapezoid(V(X_i)).
/// Its exact Hessian is what hessian_kernel assembles.
inline double lattice_action(const ModelSpec& spec, const PathGrid& path) {
    check_path(path, spec.domain());
    double kinetic = 0.0;
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        const double d = path[j + 1] - path[j];
        kinetic += spec.mass()(0.5 * (path[j] + path[j + 1])) * d * d;
    }
    std::vector<double> v(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) v[i] = spec.potential()(path[i]);
    return kinetic / (2.0 * path.dtau) + trapezoid(v, path.dtau);
}

/// (dS/dX_i) / dtau at interior sites: the lattice Euler-Lagrange residual.
inline std::vector<double> lattice_residual(const ModelSpec& spec, const PathGrid& path) {
    detail::check_kernel_path(spec, path);
    const auto links = detail::link_terms(spec, path);
    const double h = path.dtau;
    std::vector<double> r(path.size() - 2);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const auto& right = links[i];
        const auto& left = links[i - 1];
        r[i - 1] = spec.potential().derivative(1, path[i]) +
                   0.25 * (right.slope * right.velocity * right.velocity +
                           left.slope * left.velocity * left.velocity) -
                   (right.mass * right.velocity - left.mass * left.velocity) / h;
    }
    return r;
}

/// Covariant fluctuation kernel: lattice Hessian of the action divided by
/// dtau, minus gamma(X_i) times the lattice Euler-Lagrange residual on the
/// diagonal. Consistent to O(dtau^2) with
///   -[m d^2 + m' Xdot d + m' Xddot + m'' Xdot^2 / 2 - V''] - gamma (V' - m' Xdot^2/2 - m Xddot).
inline KernelMatrix hessian_kernel(const ModelSpec& spec, const PathGrid& path) {
    detail::check_kernel_path(spec, path);
    const auto links = detail::link_terms(spec, path);
    const auto residual = lattice_residual(spec, path);
    const double h = path.dtau;
    const double h2 = h * h;
    const std::size_t n = path.size() - 2;

    KernelMatrix k;
    k.dtau = h;
    k.diagonal.resize(n);
    k.off_diagonal.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const auto& right = links[i];    // site i is its left end
        const auto& left = links[i - 1];  // site i is its right end
        const double a_right = right.curvature * right.velocity * right.velocity / 8.0;
        const double a_left = left.curvature * left.velocity * left.velocity / 8.0;
        const double from_right = a_right - right.slope * right.velocity / h + right.mass / h2;
        const double from_left = a_left + left.slope * left.velocity / h + left.mass / h2;
        const double x = path[i];
        const double gamma = spec.mass().derivative(1, x) / (2.0 * spec.mass()(x));
        k.diagonal[i - 1] =
            from_right + from_left + spec.potential().derivative(2, x) - gamma * residual[i - 1];
        if (i + 2 < path.size()) k.off_diagonal[i - 1] = a_right - right.mass / h2;
    }
    return k;
}

/// Einbein-transformed kernel [-d^2 + Omega^2(X)]: diagonal 2/dtau^2 + Omega^2(X_i),
/// off-diagonal -1/dtau^2.
inline KernelMatrix transformed_kernel(const ModelSpec& spec, const PathGrid& path) {
    detail::check_kernel_path(spec, path);
    const double h2 = path.dtau * path.dtau;
    const std::size_t n = path.size() - 2;
    KernelMatrix k;
    k.dtau = path.dtau;
    k.diagonal.resize(n);
    k.off_diagonal.assign(n > 0 ? n - 1 : 0, -1.0 / h2);
    for (std::size_t i = 0; i < n; ++i) k.diagonal[i] = 2.0 / h2 + omega_sq(spec, path[i + 1]);
    return k;
}

/// e K e with e = diag(sqrt(m(X_i))) over interior points.
inline KernelMatrix einbein_congruence(const KernelMatrix& k, const ModelSpec& spec,
                                       const PathGrid& path) {
    if (k.size() + 2 != path.size()) throw InvalidArgument("kernel and path sizes differ");
    std::vector<double> e(k.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = einbein(spec, path[i + 1]);
    KernelMatrix out = k;
    for (std::size_t i = 0; i < e.size(); ++i) out.diagonal[i] *= e[i] * e[i];
    for (std::size_t i = 0; i + 1 < e.size(); ++i) out.off_diagonal[i] *= e[i] * e[i + 1];
    return out;
}

/// Omega * T at the two ends of the path; large values mean the Dirichlet
/// walls sit far from the region where the background moves.
inline std::pair<double, double> boundary_influence(const ModelSpec& spec, const PathGrid& path) {
    auto at = [&](double x) {
        const double w2 = omega_sq(spec, x);
        return w2 > 0.0 ? std::sqrt(w2) * path.horizon() : 0.0;
    };
    return {at(path.values.front()), at(path.values.back())};
}

}  // namespace oneloop
