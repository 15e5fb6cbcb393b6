#include "support.hpp"

using namespace oneloop;
using Catch::Approx;

namespace {
const Domain kY{-2.0, 2.0};
}

TEST_CASE("CoordinateMap: monotonicity and inverse") {
    CHECK_THROWS_AS(CoordinateMap::parse("y^2", {-1.0, 1.0}), NonMonotoneMap);
    CHECK_THROWS_AS(CoordinateMap::parse("sin(y)", {0.0, 3.0}), NonMonotoneMap);
    CHECK_NOTHROW(CoordinateMap::parse("y^2", {0.5, 2.0}));
    CHECK_THROWS_AS(CoordinateMap::parse("x", kY), ParseError);
    const auto dec = CoordinateMap::parse("-2*y + 1", kY);
    CHECK(dec.direction() == -1);
    CHECK(dec.image().lo == -3.0);
    CHECK(dec.inverse(0.0) == Approx(0.5).epsilon(1e-15));
    const auto s = CoordinateMap::parse("sinh(y)", kY);
    CHECK(s.inverse(std::sinh(1.0)) == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(s.inverse(10.0), DomainError);
}

TEST_CASE("pushforward_model: spec examples") {
    const auto spec = testing::standard();
    const auto id = pushforward_model(spec, CoordinateMap::parse("y", kY));
    for (double y : testing::linspace(-2.0, 2.0, 9)) {
        CHECK(id.mass()(y) == spec.mass()(y));
        CHECK(id.potential()(y) == spec.potential()(y));
    }
    const auto lin = pushforward_model(spec, CoordinateMap::parse("2*y", kY));
    for (double y : testing::linspace(-2.0, 2.0, 9)) {
        CHECK(lin.mass()(y) == Approx(4 * spec.mass()(2 * y)).epsilon(1e-15));
        CHECK(lin.potential()(y) == Approx(spec.potential()(2 * y)).epsilon(1e-15));
    }
    const auto sh = pushforward_model(testing::model("1", "0.5*x^2"), CoordinateMap::parse("sinh(y)", kY));
    for (double y : testing::linspace(-2.0, 2.0, 9)) {
        CHECK(sh.mass()(y) == Approx(std::pow(std::cosh(y), 2)).epsilon(1e-14));
        CHECK(sh.potential()(y) == Approx(0.5 * std::pow(std::sinh(y), 2)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(pushforward_model(testing::model("1", "x", 1.0, {-1.0, 1.0}), CoordinateMap::parse("sinh(y)", kY)),
                    DomainError);
}

TEST_CASE("pushforward_path: spec examples") {
    const PathGrid p(0.0, 0.1, {0.0, 1.0, 2.0});
    CHECK(pushforward_path(p, CoordinateMap::parse("y", kY)).values == p.values);
    const auto half = pushforward_path(p, CoordinateMap::parse("2*y", kY)).values;
    CHECK(half[0] == 0.0);
    CHECK(half[1] == Approx(0.5).epsilon(1e-15));
    CHECK(half[2] == Approx(1.0).epsilon(1e-15));
    const PathGrid q(0.0, 0.1, {0.0, 1.1752011936438014, 0.0});
    CHECK(pushforward_path(q, CoordinateMap::parse("sinh(y)", kY))[1] == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("check_scalar and check_tensor: spec examples") {
    const auto spec = testing::standard();
    const auto id = CoordinateMap::parse("y", kY);
    CHECK(check_scalar(spec, id, 201).max_defect == 0.0);
    CHECK(check_tensor(spec, id, 201).max_defect == 0.0);
    for (const auto& s : testing::smooth_specs()) {
        const auto m = testing::model(s.mass, s.potential);
        CHECK(check_scalar(m, CoordinateMap::parse("2*y", {-1.0, 1.0}), 201).max_defect <= 1e-12);
        CHECK(check_tensor(m, CoordinateMap::parse("2*y", {-1.0, 1.0}), 201).max_defect <= 1e-12);
    }
    const auto lin = pushforward_model(spec, CoordinateMap::parse("2*y", {-1.0, 1.0}));
    for (double y : testing::linspace(-1.0, 1.0, 11)) CHECK(z1(lin, y) == Approx(4 * z1(spec, 2 * y)).margin(1e-15));
    const auto sh = CoordinateMap::parse("sinh(y)", {-2.5, 2.5});
    const auto scalar = check_scalar(spec, sh, 1001);
    const auto tensor = check_tensor(spec, sh, 1001);
    CHECK(scalar.passed());
    CHECK(scalar.max_defect <= 1e-9);
    CHECK(tensor.passed());
    CHECK(tensor.max_defect <= 1e-9);
    CHECK(scalar.skipped == 0);
}

TEST_CASE("check_scalar skips V1 where Omega^2 <= 0") {
    const auto spec = testing::model("exp(2*x)", "x + x^2");
    const auto r = check_scalar(spec, CoordinateMap::parse("y + 0.1*y^3", {-1.0, 1.0}), 101);
    CHECK(r.skipped > 0);
    CHECK(r.skipped < 101);
    CHECK(r.passed());
}

TEST_CASE("check_action_invariance: spec examples") {
    const auto spec = testing::standard();
    const PathGrid p = make_bump_path({0.0, 1.0, 0.2, 200.0}, 4001);
    const auto id = check_action_invariance(spec, CoordinateMap::parse("y", kY), p, 1.0);
    CHECK(id.max_defect <= 1e-15);
    const auto lin = check_action_invariance(spec, CoordinateMap::parse("2*y", kY), p, 1.0);
    CHECK(lin.max_defect <= 1e-10);

    const auto sh = CoordinateMap::parse("sinh(y)", {-2.5, 2.5});
    const auto coarse = check_action_invariance(spec, sh, p, 1.0);
    const auto fine = check_action_invariance(spec, sh, make_bump_path({0.0, 1.0, 0.2, 200.0}, 8001), 1.0);
    CHECK(coarse.passed());
    CHECK(coarse.max_defect <= 1e-6);
    CHECK(coarse.max_defect / fine.max_defect == Approx(4.0).epsilon(0.25));
}

TEST_CASE("property: pushforward composes") {
    const auto spec = testing::standard();
    const auto outer = CoordinateMap::parse("sinh(y)", {-2.0, 2.0});
    const auto inner = CoordinateMap::parse("0.5*y + 0.1*y^3", {-1.5, 1.5});
    const auto step = pushforward_model(pushforward_model(spec, outer), inner);
    const auto direct = pushforward_model(spec, compose(outer, inner));
    for (double z : testing::linspace(-1.5, 1.5, 31)) {
        CHECK(relative_defect(step.mass()(z), direct.mass()(z)) <= 1e-10);
        CHECK(relative_defect(step.potential()(z), direct.potential()(z), 1e-12) <= 1e-10);
        CHECK(relative_defect(omega_sq(step, z), omega_sq(direct, z)) <= 1e-10);
    }
}

TEST_CASE("property: pushing forward and back restores the model") {
    const auto spec = testing::standard();
    const auto there = CoordinateMap::parse("sinh(y)", {-2.0, 2.0});
    const auto back = CoordinateMap::parse("log(y + sqrt(y^2 + 1))", {std::sinh(-1.5), std::sinh(1.5)});
    const auto round = pushforward_model(pushforward_model(spec, there), back);
    for (double x : testing::linspace(std::sinh(-1.5), std::sinh(1.5), 31)) {
        CHECK(relative_defect(round.mass()(x), spec.mass()(x)) <= 1e-10);
        CHECK(relative_defect(round.potential()(x), spec.potential()(x), 1e-12) <= 1e-10);
    }
}
