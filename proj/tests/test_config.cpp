#include "support.hpp"

using namespace oneloop;
using Catch::Matchers::ContainsSubstring;

namespace {
const char* kMinimal = R"([model]
mass = "1 + x^2"   # metric
potential = "0.5*x^2"
domain = -5, 5
)";

std::string field_of(const std::string& text) {
    try {
        parse_config_string(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}
}  // namespace

TEST_CASE("parse_config: minimal model") {
    const RunConfig c = parse_config_string(kMinimal);
    CHECK(c.mass_expr == "1 + x^2");
    CHECK(c.potential_expr == "0.5*x^2");
    CHECK(c.hbar == 1.0);
    CHECK(c.domain.lo == -5.0);
    CHECK(c.domain.hi == 5.0);
    CHECK_FALSE(c.grid);
    CHECK_FALSE(c.sweep);
    CHECK(c.model().mass()(1.0) == 2.0);
}

TEST_CASE("parse_config: all sections") {
    const std::string text = std::string(kMinimal) + R"cfg(
[grid]
T = 40
N = 1001
[sweep]
from = -1
to = 1
count = 3
[bump]
x0 = 0.5
amplitude = 1
s = 0.1, 0.2
span = 30
[orbit]
x = 1
xdot = -0.5
T = 2
dtau = 0.01
[map]
expr = "x = sinh(y)"
domain = -1, 1
samples = 11
[validate]
samples = 7
)cfg";
    const RunConfig c = parse_config_string(text);
    CHECK(c.grid->N == 1001);
    CHECK(c.sweep->count == 3);
    CHECK(c.bump->rates == std::vector<double>{0.1, 0.2});
    CHECK(c.bump->horizon(0.1, *c.grid) == Catch::Approx(300.0));
    CHECK(c.orbit->xdot == -0.5);
    CHECK(c.map->expr == "sinh(y)");
    CHECK(c.map->samples == 11);
    CHECK(c.validate_samples == 7);
}

TEST_CASE("parse_config: errors name the field") {
    CHECK(field_of("[grid]\nT = 1\nN = 100\n") == "model");
    CHECK(field_of("[model]\nmass = \"1\"\ndomain = 0, 1\n") == "model.potential");
    CHECK(field_of("[model]\nmass = 1\npotential = \"x\"\ndomain = 0, 1\n") == "model.mass");
    CHECK(field_of(std::string(kMinimal) + "colour = 3\n") == "model.colour");
    CHECK(field_of(std::string(kMinimal) + "[grid]\nT = 10\nN = 8\n") == "grid.N");
    CHECK(field_of(std::string(kMinimal) + "[grid]\nT = -1\nN = 80\n") == "grid.T");
    CHECK(field_of(std::string(kMinimal) + "[grid]\nT = 1\nN = 80.5\n") == "grid.N");
    CHECK(field_of(std::string(kMinimal) + "[grid]\nT = abc\nN = 80\n") == "grid.T");
    CHECK(field_of(std::string(kMinimal) + "[sweep]\nfrom = 1\nto = 0\ncount = 3\n") == "sweep.to");
    CHECK(field_of(std::string(kMinimal) + "[bump]\nx0 = 0\namplitude = 1\ns = 0.1, -2\n") == "bump.s");
    CHECK(field_of(std::string(kMinimal) + "[orbit]\nx = 0\nxdot = 0\nT = 1\ndtau = 0\n") == "orbit.dtau");
    CHECK(field_of(std::string(kMinimal) + "[extra]\na = 1\n") == "extra");
    CHECK(field_of("[model]\nmass = \"1\"\npotential = \"x\"\ndomain = 1, 0\n") == "model.domain");
    CHECK(field_of("[model]\nmass = \"1\"\npotential = \"x\"\nhbar = -1\ndomain = 0, 1\n") == "model.hbar");
    CHECK(field_of("[model]\nmass = \"1\"\nmass = \"2\"\n") == "model.mass");
    CHECK(field_of("mass = \"1\"\n") == "");
    CHECK(field_of("[model\n") == "");
    CHECK(field_of("[model]\nmass = \"1\n") == "model.mass");
}

TEST_CASE("RunConfig::model reports expression errors against the field") {
    RunConfig c = parse_config_string(kMinimal);
    c.potential_expr = "0.5*x^";
    try {
        c.model();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "model.potential");
        CHECK_THAT(e.what(), ContainsSubstring("column 7"));
    }
}

TEST_CASE("load_config: missing file") {
    CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
}
