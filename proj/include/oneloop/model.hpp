#pragma once

#include "oneloop/errors.hpp"
#include "oneloop/expr.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oneloop {

/// A scalar function of one variable with exact derivatives up to `max_order`,
/// obtained by structural differentiation and compiled to tapes.
class Function1D {
public:
    Function1D() : Function1D(Expr()) {}

    explicit Function1D(Expr base, int max_order = kMaxDerivativeOrder) {
        if (max_order < 0 || max_order > kMaxDerivativeOrder)
            throw InvalidArgument("Function1D: max_order must be in [0, 4]");
        auto impl = std::make_shared<Impl>();
        impl->exprs.push_back(std::move(base));
        for (int k = 1; k <= max_order; ++k)
            impl->exprs.push_back(differentiate(impl->exprs.back(), 1));
        for (const auto& e : impl->exprs) impl->tapes.emplace_back(e);
        impl_ = std::move(impl);
    }

    static Function1D parse(std::string_view source, std::string_view var = "x",
                            int max_order = kMaxDerivativeOrder) {
        return Function1D(parse_expression(source, var), max_order);
    }

    double operator()(double x) const { return impl_->tapes[0](x); }

    double derivative(int k, double x) const { return impl_->tapes[checked(k)](x); }

    const Expr& expr(int k = 0) const { return impl_->exprs[checked(k)]; }

    int max_order() const noexcept { return static_cast<int>(impl_->exprs.size()) - 1; }

    /// The k-th derivative as a function in its own right.
    Function1D deriv(int k) const {
        return Function1D(expr(k), max_order() - k);
    }

private:
    struct Impl {
        std::vector<Expr> exprs;
        std::vector<Tape> tapes;
    };

    std::size_t checked(int k) const {
        if (k < 0 || k > max_order())
            throw InvalidArgument("derivative order " + std::to_string(k) +
                                  " exceeds the cached maximum " + std::to_string(max_order()));
        return static_cast<std::size_t>(k);
    }

    std::shared_ptr<const Impl> impl_;
};

/// Closed interval [lo, hi] of configuration space.
struct Domain {
    double lo = -1.0;
    double hi = 1.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }

    void check(double x) const {
        if (!contains(x))
            throw DomainError("point " + detail::format_number(x) + " outside domain [" +
                              detail::format_number(lo) + ", " + detail::format_number(hi) + "]");
    }

    double width() const noexcept { return hi - lo; }
};

/// Symbolic fields derived from (m, V) once per model: the einbein sqrt(m),
/// the covariant frequency Omega^2 and its root, and the Laplace-Beltrami
/// flux sqrt(m) V'/m.
struct Geometry {
    Function1D einbein;
    Function1D omega_sq;
    Function1D omega;
    Function1D lb_flux;
};

/// The pair (m, V) with the constant hbar on a closed configuration domain.
class ModelSpec {
public:
    ModelSpec(Function1D mass, Function1D potential, double hbar, Domain domain)
        : mass_(std::move(mass)), potential_(std::move(potential)), hbar_(hbar), domain_(domain) {
        if (!(domain_.lo < domain_.hi)) throw InvalidArgument("model domain requires lo < hi");
        if (!(hbar_ >= 0.0) || !std::isfinite(hbar_))
            throw InvalidArgument("hbar must be a finite non-negative number");
        if (mass_.max_order() < 2 || potential_.max_order() < 3)
            throw InvalidArgument("model needs m up to m'' and V up to V'''");
        const Expr& m = mass_.expr(0);
        const Expr& m1 = mass_.expr(1);
        const Expr& v1 = potential_.expr(1);
        const Expr& v2 = potential_.expr(2);
        auto g = std::make_shared<Geometry>();
        const Expr h = sqrt(m);
        const Expr w2 = (v2 - m1 * v1 / (2.0 * m)) / m;
        g->einbein = Function1D(h, 1);
        g->omega_sq = Function1D(w2, 1);
        g->omega = Function1D(sqrt(w2), 1);
        g->lb_flux = Function1D(h * (v1 / m), 1);
        geometry_ = std::move(g);
    }

    static ModelSpec parse(std::string_view mass, std::string_view potential, double hbar,
                           Domain domain) {
        return ModelSpec(Function1D::parse(mass), Function1D::parse(potential), hbar, domain);
    }

    const Function1D& mass() const noexcept { return mass_; }
    const Function1D& potential() const noexcept { return potential_; }
    double hbar() const noexcept { return hbar_; }
    const Domain& domain() const noexcept { return domain_; }
    const Geometry& geometry() const noexcept { return *geometry_; }

    ModelSpec with_hbar(double hbar) const {
        ModelSpec copy = *this;
        if (!(hbar >= 0.0) || !std::isfinite(hbar))
            throw InvalidArgument("hbar must be a finite non-negative number");
        copy.hbar_ = hbar;
        return copy;
    }

private:
    Function1D mass_;
    Function1D potential_;
    double hbar_;
    Domain domain_;
    std::shared_ptr<const Geometry> geometry_;
};

struct ValidationReport {
    std::vector<double> x;
    std::vector<double> mass;
    /// NaN where the mass is not positive (Omega^2 undefined there).
    std::vector<double> omega_sq;
    double min_mass = std::numeric_limits<double>::infinity();
    double min_mass_at = 0.0;
    std::size_t nonpositive_omega_sq = 0;

    bool mass_positive() const noexcept { return min_mass > 0.0; }
};

/// Samples m (and V) at `samples` uniform points of the domain; reports the
/// minimum mass and, as advisory, the sign of Omega^2.
inline ValidationReport validate_model(const ModelSpec& spec, std::size_t samples) {
    if (samples < 2) throw InvalidArgument("validate_model: samples must be >= 2");
    ValidationReport r;
    const Domain& d = spec.domain();
    const auto& g = spec.geometry();
    for (std::size_t i = 0; i < samples; ++i) {
        const double x =
            (i + 1 == samples) ? d.hi : d.lo + d.width() * static_cast<double>(i) / (samples - 1);
        const double m = spec.mass()(x);
        const double v = spec.potential()(x);
        if (!std::isfinite(m) || !std::isfinite(v))
            throw DomainError("non-finite model value at x = " + detail::format_number(x));
        double w2 = std::numeric_limits<double>::quiet_NaN();
        if (m > 0.0) {
            w2 = g.omega_sq(x);
            if (!std::isfinite(w2))
                throw DomainError("non-finite Omega^2 at x = " + detail::format_number(x));
            if (w2 <= 0.0) ++r.nonpositive_omega_sq;
        }
        if (m < r.min_mass) {
            r.min_mass = m;
            r.min_mass_at = x;
        }
        r.x.push_back(x);
        r.mass.push_back(m);
        r.omega_sq.push_back(w2);
    }
    return r;
}

}  // namespace oneloop
