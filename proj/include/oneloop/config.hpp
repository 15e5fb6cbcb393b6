#pragma once

// Run configuration: a flat key-value text file with [section] headers.
//
//   # comment
//   [model]
//   mass = "1 + x^2"
//   potential = "0.5*x^2"
//   hbar = 1
//   domain = -5, 5
//
// Values are numbers, comma-separated number lists, or double-quoted strings.

#include "oneloop/errors.hpp"
#include "oneloop/model.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace oneloop {

/// Configuration error; `field` is the dotted path (section.key) when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct GridBlock {
    double T = 0.0;
    std::size_t N = 0;
};

struct SweepBlock {
    double from = 0.0;
    double to = 0.0;
    std::size_t count = 0;
};

struct BumpBlock {
    double x0 = 0.0;
    double amplitude = 0.0;
    std::vector<double> rates;
    /// If set, each rate s runs on the horizon span / s instead of grid.T.
    std::optional<double> span;

    double horizon(double rate, const GridBlock& grid) const { return span ? *span / rate : grid.T; }
};

struct OrbitBlock {
    double x = 0.0;
    double xdot = 0.0;
    double T = 0.0;
    double dtau = 0.0;
};

struct MapBlock {
    std::string expr;
    Domain y_domain;
    std::size_t samples = 201;
};

struct RunConfig {
    std::string mass_expr;
    std::string potential_expr;
    double hbar = 1.0;
    Domain domain;
    std::optional<GridBlock> grid;
    std::optional<SweepBlock> sweep;
    std::optional<BumpBlock> bump;
    std::optional<OrbitBlock> orbit;
    std::optional<MapBlock> map;
    std::size_t validate_samples = 101;

    /// Builds the model; expression errors are reported against model.mass / model.potential.
    ModelSpec model() const {
        auto fn = [](const std::string& src, const char* field) {
            try {
                return Function1D::parse(src);
            } catch (const ParseError& e) {
                throw ConfigError(field, e.what());
            }
        };
        return ModelSpec(fn(mass_expr, "model.mass"), fn(potential_expr, "model.potential"), hbar, domain);
    }
};

namespace detail {

struct RawValue {
    std::string text;
    bool quoted = false;
    std::size_t line = 0;
};

using RawSections = std::map<std::string, std::map<std::string, RawValue>>;

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline RawSections parse_sections(std::istream& in) {
    RawSections out;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno);
        // strip a trailing comment that is not inside quotes
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quotes = !in_quotes;
            if (line[i] == '#' && !in_quotes) {
                line.resize(i);
                break;
            }
        }
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("", where + ": malformed section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section.empty()) throw ConfigError("", where + ": empty section name");
            if (out.count(section)) throw ConfigError(section, where + ": duplicate section");
            out[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("", where + ": expected key = value");
        if (section.empty()) throw ConfigError("", where + ": key outside of any section");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        const std::string field = section + "." + key;
        if (key.empty()) throw ConfigError("", where + ": empty key");
        if (out[section].count(key)) throw ConfigError(field, where + ": duplicate key");
        RawValue rv{value, false, lineno};
        if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw ConfigError(field, where + ": unterminated string");
            rv.text = value.substr(1, value.size() - 2);
            rv.quoted = true;
        }
        out[section][key] = rv;
    }
    return out;
}

class SectionReader {
public:
    SectionReader(std::string name, std::map<std::string, RawValue> values)
        : name_(std::move(name)), values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string string(const std::string& key) {
        const RawValue& v = take(key);
        if (!v.quoted) throw ConfigError(field(key), "expected a double-quoted string");
        return v.text;
    }

    std::vector<double> numbers(const std::string& key) {
        const RawValue& v = take(key);
        if (v.quoted) throw ConfigError(field(key), "expected a number, got a string");
        std::vector<double> out;
        std::stringstream ss(v.text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            double d = 0.0;
            const auto res = std::from_chars(t.data(), t.data() + t.size(), d);
            if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(d))
                throw ConfigError(field(key), "malformed number '" + t + "'");
            out.push_back(d);
        }
        if (out.empty()) throw ConfigError(field(key), "missing value");
        return out;
    }

    double number(const std::string& key) {
        auto v = numbers(key);
        if (v.size() != 1) throw ConfigError(field(key), "expected a single number");
        return v.front();
    }

    std::size_t count(const std::string& key) {
        const double d = number(key);
        if (d < 0 || d != std::floor(d) || d > 1e9)
            throw ConfigError(field(key), "expected a non-negative integer");
        return static_cast<std::size_t>(d);
    }

    Domain interval(const std::string& key) {
        auto v = numbers(key);
        if (v.size() != 2) throw ConfigError(field(key), "expected two numbers: lo, hi");
        if (!(v[0] < v[1])) throw ConfigError(field(key), "interval requires lo < hi");
        return {v[0], v[1]};
    }

    /// Rejects keys that were never read.
    void finish() const {
        for (const auto& [key, v] : values_)
            if (!used_.count(key))
                throw ConfigError(field(key), "unknown key (line " + std::to_string(v.line) + ")");
    }

    std::string field(const std::string& key) const { return name_ + "." + key; }

private:
    const RawValue& take(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(field(key), "missing required field");
        used_[key] = true;
        return it->second;
    }

    std::string name_;
    std::map<std::string, RawValue> values_;
    std::map<std::string, bool> used_;
};

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
    auto sections = detail::parse_sections(in);
    RunConfig cfg;
    auto section = [&](const std::string& name) -> std::optional<detail::SectionReader> {
        auto it = sections.find(name);
        if (it == sections.end()) return std::nullopt;
        detail::SectionReader r(name, it->second);
        sections.erase(it);
        return r;
    };

    auto model = section("model");
    if (!model) throw ConfigError("model", "missing required section");
    cfg.mass_expr = model->string("mass");
    cfg.potential_expr = model->string("potential");
    if (model->has("hbar")) cfg.hbar = model->number("hbar");
    if (!(cfg.hbar >= 0.0)) throw ConfigError("model.hbar", "must be non-negative");
    cfg.domain = model->interval("domain");
    model->finish();

    if (auto s = section("grid")) {
        GridBlock g{s->number("T"), s->count("N")};
        if (!(g.T > 0.0)) throw ConfigError("grid.T", "must be positive");
        if (g.N < 16) throw ConfigError("grid.N", "must be at least 16");
        s->finish();
        cfg.grid = g;
    }
    if (auto s = section("sweep")) {
        SweepBlock b{s->number("from"), s->number("to"), s->count("count")};
        if (!(b.from < b.to)) throw ConfigError("sweep.to", "sweep requires from < to");
        if (b.count < 2) throw ConfigError("sweep.count", "must be at least 2");
        s->finish();
        cfg.sweep = b;
    }
    if (auto s = section("bump")) {
        BumpBlock b{s->number("x0"), s->number("amplitude"), s->numbers("s"), std::nullopt};
        if (s->has("span")) {
            b.span = s->number("span");
            if (!(*b.span > 0.0)) throw ConfigError("bump.span", "must be positive");
        }
        for (double r : b.rates)
            if (!(r > 0.0)) throw ConfigError("bump.s", "rates must be positive");
        s->finish();
        cfg.bump = b;
    }
    if (auto s = section("orbit")) {
        OrbitBlock o{s->number("x"), s->number("xdot"), s->number("T"), s->number("dtau")};
        if (!(o.dtau > 0.0)) throw ConfigError("orbit.dtau", "must be positive");
        if (!(o.T >= o.dtau)) throw ConfigError("orbit.T", "must be at least dtau");
        s->finish();
        cfg.orbit = o;
    }
    if (auto s = section("map")) {
        MapBlock m;
        m.expr = s->string("expr");
        // an optional leading "x =" is accepted
        if (const auto t = detail::trim(m.expr); t.size() > 1 && t[0] == 'x') {
            const auto rest = detail::trim(std::string_view(t).substr(1));
            if (!rest.empty() && rest.front() == '=') m.expr = detail::trim(std::string_view(rest).substr(1));
        }
        m.y_domain = s->interval("domain");
        if (s->has("samples")) m.samples = s->count("samples");
        if (m.samples < 2) throw ConfigError("map.samples", "must be at least 2");
        s->finish();
        cfg.map = m;
    }
    if (auto s = section("validate")) {
        cfg.validate_samples = s->count("samples");
        if (cfg.validate_samples < 2) throw ConfigError("validate.samples", "must be at least 2");
        s->finish();
    }
    if (!sections.empty()) throw ConfigError(sections.begin()->first, "unknown section");
    return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace oneloop
