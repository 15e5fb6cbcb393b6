#include "support.hpp"

using namespace oneloop;
using Catch::Approx;

namespace {

FrequencyProfile profile(const std::function<double(double)>& w2, double T, std::size_t n, double w02) {
    const double h = T / static_cast<double>(n - 1);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = w2(-T / 2 + h * static_cast<double>(i));
    return FrequencyProfile(-T / 2, h, std::move(v), w02);
}

FrequencyProfile constant(double w2, double T, std::size_t n, double w02) {
    return profile([w2](double) { return w2; }, T, n, w02);
}

/// log of the Dirichlet determinant ratio for constant frequencies.
double sinh_ratio(double w, double w0, double T) {
    auto log_sinh_over = [](double a, double t) {
        // log(sinh(a t) / a), stable for large a t
        return a * t + std::log1p(-std::exp(-2 * a * t)) - std::log(2 * a);
    };
    return log_sinh_over(w, T) - log_sinh_over(w0, T);
}

struct SmoothProfile {
    double a, b, c, d, e;
    double operator()(double t) const {
        const double s = 1 / std::cosh(b * (t - c));
        return 1.0 + a * s * s + d * std::sin(e * t) * std::sin(e * t);
    }
};

std::vector<SmoothProfile> smooth_profiles() {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> a(-0.5, 1.5), b(0.3, 1.5), c(-2.0, 2.0), d(0.0, 0.5), e(0.2, 1.0);
    std::vector<SmoothProfile> out;
    for (int i = 0; i < 3; ++i) out.push_back({a(rng), b(rng), c(rng), d(rng), e(rng)});
    return out;
}

}  // namespace

TEST_CASE("FrequencyProfile construction") {
    CHECK_THROWS_AS(FrequencyProfile(0.0, 0.1, {1.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(FrequencyProfile(0.0, 0.0, {1.0, 1.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(FrequencyProfile(0.0, 0.1, {1.0, 1.0}, 0.0), NonPositiveFrequency);
    const FrequencyProfile p(0.0, 0.5, {1.0, 2.0, 1.0}, 1.0);
    CHECK(p.horizon() == 1.0);
    CHECK(p.pinned());
    CHECK_FALSE(FrequencyProfile(0.0, 0.5, {1.0, 2.0, 1.1}, 1.0).pinned());
}

TEST_CASE("gy_logdet_ratio: spec examples") {
    CHECK(gy_logdet_ratio(constant(1.7, 10.0, 1001, 1.7)) == 0.0);
    const double got = gy_logdet_ratio(constant(1.3 * 1.3, 10.0, 4001, 1.0));
    CHECK(relative_defect(got, sinh_ratio(1.3, 1.0, 10.0)) <= 1e-8);

    double previous = 0.0;
    for (double A : {0.05, 0.1, 0.2}) {
        const double r = gy_logdet_ratio(
            profile([A](double t) { return 1.0 + A / std::pow(std::cosh(0.5 * t), 2); }, 40.0, 4001, 1.0));
        CHECK(r > previous);
        previous = r;
    }
}

TEST_CASE("gy_logdet_ratio: log scaling avoids overflow") {
    // Omega T = 5000: y(T) ~ e^5000
    const double got = gy_logdet_ratio(constant(2500.0, 100.0, 200001, 1.0));
    CHECK(std::isfinite(got));
    CHECK(relative_defect(got, sinh_ratio(50.0, 1.0, 100.0)) <= 1e-8);
}

TEST_CASE("gy_logdet_ratio: operator that is not positive") {
    // -d^2 - 1 on [0, 10] has negative Dirichlet modes
    CHECK_THROWS_AS(gy_logdet_ratio(constant(-1.0, 10.0, 1001, 1.0)), NotPositiveDefinite);
}

TEST_CASE("eig_logdet_ratio: spec examples") {
    CHECK(eig_logdet_ratio(constant(1.7, 10.0, 1001, 1.7)) == 0.0);
    const auto p = constant(1.3 * 1.3, 10.0, 4001, 1.0);
    CHECK(std::abs(eig_logdet_ratio(p) - gy_logdet_ratio(p)) <= 1e-4);
    CHECK(std::abs(eig_logdet_ratio(p) - sinh_ratio(1.3, 1.0, 10.0)) <= 1e-4);
}

TEST_CASE("eig_logdet_ratio: errors") {
    CHECK_THROWS_AS(eig_logdet_ratio(constant(1.0, 1.0, 15, 1.0)), InvalidArgument);
    CHECK_NOTHROW(eig_logdet_ratio(constant(1.0, 1.0, 16, 1.0)));
    try {
        eig_logdet_ratio(constant(-1.0, 10.0, 1001, 1.0));
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        // the lowest Dirichlet mode pi^2/T^2 - 1 < 0 first shows up near i ~ T/pi / h
        CHECK(e.index() > 0);
        CHECK(e.index() < 999);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("index"));
    }
}

TEST_CASE("property: GY and lattice ratios agree to O(dtau^2)") {
    for (const auto& f : smooth_profiles()) {
        auto gap = [&](std::size_t n) {
            const auto p = profile(f, 12.0, n, 1.0);
            return std::abs(gy_logdet_ratio(p) - eig_logdet_ratio(p));
        };
        const double a = gap(401), b = gap(801), c = gap(1601);
        INFO("gaps " << a << " " << b << " " << c);
        CHECK(a / b == Approx(4.0).epsilon(0.2));
        CHECK(b / c == Approx(4.0).epsilon(0.2));
    }
}

TEST_CASE("property: the log-det ratio is monotone in Omega^2") {
    for (const auto& f : smooth_profiles()) {
        const auto lo = profile(f, 12.0, 1201, 1.0);
        const auto hi = profile([&](double t) { return f(t) + 0.01 * std::exp(-t * t); }, 12.0, 1201, 1.0);
        CHECK(gy_logdet_ratio(hi) > gy_logdet_ratio(lo));
        CHECK(eig_logdet_ratio(hi) > eig_logdet_ratio(lo));
    }
}

TEST_CASE("property: ratios compose additively across references") {
    for (const auto& f : smooth_profiles()) {
        const double w0 = 1.0, w1 = 2.25;
        const double direct = gy_logdet_ratio(profile(f, 12.0, 2001, w0));
        const double via = gy_logdet_ratio(profile(f, 12.0, 2001, w1)) + gy_logdet_ratio(constant(w1, 12.0, 2001, w0));
        CHECK(std::abs(direct - via) <= 1e-8);
        const double edirect = eig_logdet_ratio(profile(f, 12.0, 2001, w0));
        const double evia = eig_logdet_ratio(profile(f, 12.0, 2001, w1)) + eig_logdet_ratio(constant(w1, 12.0, 2001, w0));
        CHECK(std::abs(edirect - evia) <= 1e-8);
    }
}

TEST_CASE("gamma1_numeric: spec examples") {
    CHECK(gamma1_numeric(constant(2.0, 10.0, 101, 2.0)) == 0.0);
    const double w = 1.5, w0 = 1.0, T = 30.0;
    const double expect = (w - w0) * T / 2 + 0.5 * std::log(w0 / w);
    CHECK(gamma1_numeric(constant(w * w, T, 6001, w0 * w0)) == Approx(expect).epsilon(1e-8));
    CHECK(gamma1_eigen(constant(w * w, T, 6001, w0 * w0)) == Approx(expect).epsilon(1e-4));
}

TEST_CASE("gamma1_expansion: spec examples") {
    const auto spec = testing::standard();
    const PathGrid rest(-5.0, 0.01, std::vector<double>(1001, 0.0));
    CHECK(gamma1_expansion(spec, rest, 1.0) == 0.0);

    // slow plateau: the expansion is the integral of (Omega - Omega0)/2 up to a small kinetic part
    const BumpShape shape{0.0, 0.6, 0.01, 4000.0};
    const PathGrid slow = make_bump_path(shape, 40001);
    const double full = gamma1_expansion(spec, slow, 1.0, true);
    const double potential_only = gamma1_expansion(spec, slow, 1.0, false);
    std::vector<double> f(slow.size());
    for (std::size_t i = 0; i < slow.size(); ++i) f[i] = 0.5 * (1 / (1 + slow[i] * slow[i]) - 1.0);
    CHECK(potential_only == Approx(trapezoid(f, slow.dtau)).epsilon(1e-13));
    CHECK(std::abs(full - potential_only) / std::abs(potential_only) < 1e-3);

    // moderate bump: agreement with the oracle within eps^2
    const PathGrid bump = make_bump_path({0.0, 1.0, 0.0873, 40.0 / 0.0873}, 100001);
    const double eps = adiabaticity(spec, bump).max;
    const double exact = gamma1_numeric(profile_from_path(spec, bump, 1.0));
    CHECK(std::abs(exact - gamma1_expansion(spec, bump, 1.0)) / std::abs(exact) <= eps * eps);
}

TEST_CASE("gamma1_expansion: errors") {
    const auto spec = testing::standard();
    const PathGrid off(-5.0, 0.01, std::vector<double>(1001, 0.5));
    CHECK_THROWS_AS(gamma1_expansion(spec, off, 1.0), EndpointMismatch);
    CHECK_THROWS_AS(gamma1_expansion(spec, off, 0.0), NonPositiveFrequency);
    const auto neg = testing::model("exp(2*x)", "x");
    const PathGrid p(0.0, 0.1, {0.0, 0.1, 0.0});
    CHECK_THROWS_AS(gamma1_expansion(neg, p, 1.0), DomainError);
}

TEST_CASE("v1_momentum_check: spec examples") {
    CHECK(v1_momentum_check(1.0, 1.0) == 0.0);
    CHECK(v1_momentum_check(4.0, 1.0) == Approx(0.5).epsilon(1e-12));
    CHECK(v1_momentum_check(0.0625, 1.0) == Approx(-0.375).epsilon(1e-12));
    CHECK_THROWS_AS(v1_momentum_check(0.0, 1.0), NonPositiveFrequency);
    for (double w : {0.1, 0.7, 3.0, 20.0}) CHECK(v1_momentum_check(w * w, 2.0) == Approx((w - std::sqrt(2.0)) / 2).epsilon(1e-12));
}

TEST_CASE("property: the Gamma1 oracle is identical in both charts") {
    const auto spec = testing::standard();
    const auto map = CoordinateMap::parse("sinh(y)", {-2.5, 2.5});
    const auto pulled = pushforward_model(spec, map);
    const PathGrid px = make_bump_path({0.0, 1.0, 0.2, 200.0}, 4001);
    const PathGrid py = pushforward_path(px, map);
    const auto fx = profile_from_path(spec, px, 1.0);
    const auto fy = profile_from_path(pulled, py, 1.0);
    for (std::size_t i = 0; i < fx.size(); ++i) REQUIRE(relative_defect(fx.omega_sq[i], fy.omega_sq[i]) <= 1e-9);
    CHECK(gamma1_numeric(fy) == Approx(gamma1_numeric(fx)).epsilon(1e-9));
}
