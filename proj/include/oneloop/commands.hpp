#pragma once

// Batch commands behind the CLI. Each returns its CSV and/or summary text so
// that output assembly stays deterministic and testable in-process.

#include "oneloop/config.hpp"
#include "oneloop/covariant.hpp"
#include "oneloop/dynamics.hpp"
#include "oneloop/effective.hpp"
#include "oneloop/numeric.hpp"
#include "oneloop/path.hpp"
#include "oneloop/reparam.hpp"
#include "oneloop/tracelog.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace oneloop {

struct CommandResult {
    std::string csv;
    std::string summary;
    int exit_code = 0;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int numeric = 2;
inline constexpr int internal = 3;
}  // namespace exit_code

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_number(v);
}

class CsvWriter {
public:
    explicit CsvWriter(std::initializer_list<const char*> header) {
        bool first = true;
        for (const char* h : header) {
            if (!first) out_ += ',';
            out_ += h;
            first = false;
        }
        out_ += '\n';
    }

    void row(std::initializer_list<double> cells) {
        bool first = true;
        for (double c : cells) {
            if (!first) out_ += ',';
            out_ += csv_number(c);
            first = false;
        }
        out_ += '\n';
    }

    void footer(const std::string& key, double value) {
        out_ += "# " + key + "," + csv_number(value) + "\n";
    }

    std::string str() const { return out_; }

private:
    std::string out_;
};

inline std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

template <class Block>
const Block& require(const std::optional<Block>& b, const char* section) {
    if (!b) throw ConfigError(section, "missing required section for this command");
    return *b;
}

}  // namespace detail

/// Sweep of the local quantities x, m, V, gamma, Omega^2, V1, Z1, m_eff, V_eff.
inline CommandResult cmd_eval(const RunConfig& cfg) {
    const ModelSpec spec = cfg.model();
    const SweepBlock& sw = detail::require(cfg.sweep, "sweep");
    detail::CsvWriter csv({"x", "m", "V", "gamma", "omega_sq", "V1", "Z1", "m_eff", "V_eff"});
    std::size_t nan_rows = 0;
    for (std::size_t i = 0; i < sw.count; ++i) {
        const double x = (i + 1 == sw.count)
                             ? sw.to
                             : sw.from + (sw.to - sw.from) * static_cast<double>(i) / (sw.count - 1);
        const double m = spec.mass()(x);
        const double v = spec.potential()(x);
        const double gamma = christoffel(spec, x);
        const double w2 = omega_sq(spec, x);
        double v1v = detail::kNaN, z1v = detail::kNaN, meff = detail::kNaN, veff = detail::kNaN;
        if (w2 > 0.0) {
            v1v = v1(spec, x);
            z1v = z1(spec, x);
            meff = m + spec.hbar() * z1v;
            veff = v + spec.hbar() * v1v;
        } else {
            ++nan_rows;
        }
        csv.row({x, m, v, gamma, w2, v1v, z1v, meff, veff});
    }
    csv.footer("nonpositive_omega_sq_rows", static_cast<double>(nan_rows));
    return {csv.str(), "", exit_code::ok};
}

/// Trace-log oracle against the gradient expansion for each configured bump rate.
inline CommandResult cmd_tracelog(const RunConfig& cfg) {
    const ModelSpec spec = cfg.model();
    const BumpBlock& bump = detail::require(cfg.bump, "bump");
    const GridBlock& grid = detail::require(cfg.grid, "grid");
    const double w0sq = omega_sq(spec, bump.x0);
    if (!(w0sq > 0.0)) throw NonPositiveFrequency("Omega^2(x0) <= 0: no real reference frequency", bump.x0);

    detail::CsvWriter csv({"s", "max_epsilon", "gamma1_numeric", "gamma1_eigen", "gamma1_expansion",
                           "gamma1_expansion_no_Z1", "rel_error", "rel_error_no_Z1"});
    std::vector<double> eps, err, err_no;
    double last_ratio = detail::kNaN;
    std::string boundary;
    for (double s : bump.rates) {
        const BumpShape shape{bump.x0, bump.amplitude, s, bump.horizon(s, grid)};
        const PathGrid path = make_bump_path(shape, grid.N);
        const auto profile = profile_from_path(spec, path, w0sq);
        const double max_eps = adiabaticity(spec, path).max;
        const double num = gamma1_numeric(profile);
        const double eig = gamma1_eigen(profile);
        const double expn = gamma1_expansion(spec, path, w0sq, true);
        const double exp0 = gamma1_expansion(spec, path, w0sq, false);
        const double rel = std::abs(num - expn) / std::abs(num);
        const double rel0 = std::abs(num - exp0) / std::abs(num);
        csv.row({s, max_eps, num, eig, expn, exp0, rel, rel0});
        if (max_eps > 0.0 && rel > 0.0 && std::isfinite(rel)) {
            eps.push_back(max_eps);
            err.push_back(rel);
            err_no.push_back(rel0);
        }
        last_ratio = rel0 / rel;
        const auto ends = boundary_influence(spec, path);
        boundary += "boundary Omega*T at s " + detail::csv_number(s) + ": " + detail::csv_number(ends.first) +
                    ", " + detail::csv_number(ends.second) + "\n";
    }

    std::string summary;
    summary += "reference omega0_sq " + detail::csv_number(w0sq) + "\n";
    summary += boundary;
    const double slope = eps.size() >= 2 ? log_log_slope(eps, err) : detail::kNaN;
    const double slope0 = eps.size() >= 2 ? log_log_slope(eps, err_no) : detail::kNaN;
    summary += "slope rel_error vs max_epsilon " + detail::csv_number(slope) + "\n";
    summary += "slope rel_error_no_Z1 vs max_epsilon " + detail::csv_number(slope0) + "\n";
    summary += "no_Z1/with_Z1 error ratio at last s " + detail::csv_number(last_ratio) + "\n";
    return {csv.str(), summary, exit_code::ok};
}

/// Scalar, tensor and action-invariance checks under the configured map.
inline CommandResult cmd_reparam(const RunConfig& cfg) {
    const ModelSpec spec = cfg.model();
    const MapBlock& mb = detail::require(cfg.map, "map");
    const BumpBlock& bump = detail::require(cfg.bump, "bump");
    const GridBlock& grid = detail::require(cfg.grid, "grid");
    const CoordinateMap map = [&] {
        try {
            return CoordinateMap::parse(mb.expr, mb.y_domain);
        } catch (const ParseError& e) {
            throw ConfigError("map.expr", e.what());
        }
    }();

    const auto scalar = check_scalar(spec, map, mb.samples);
    const auto tensor = check_tensor(spec, map, mb.samples);
    const PathGrid path = make_bump_path(
        {bump.x0, bump.amplitude, bump.rates.front(), bump.horizon(bump.rates.front(), grid)}, grid.N);
    const auto action = check_action_invariance(spec, map, path, spec.hbar());

    std::string s;
    s += "scalar max_defect " + detail::csv_number(scalar.max_defect) + " tolerance " +
         detail::csv_number(scalar.tolerance) + " " + detail::pass_fail(scalar.passed()) + "\n";
    s += "tensor max_defect " + detail::csv_number(tensor.max_defect) + " tolerance " +
         detail::csv_number(tensor.tolerance) + " " + detail::pass_fail(tensor.passed()) + "\n";
    s += "action classical_x " + detail::csv_number(action.classical_x) + " classical_y " +
         detail::csv_number(action.classical_y) + " effective_x " +
         detail::csv_number(action.effective_x) + " effective_y " +
         detail::csv_number(action.effective_y) + "\n";
    s += "action max_defect " + detail::csv_number(action.max_defect) + " tolerance " +
         detail::csv_number(action.tolerance) + " " + detail::pass_fail(action.passed()) + "\n";
    const bool ok = scalar.passed() && tensor.passed() && action.passed();
    s += "overall " + detail::pass_fail(ok) + "\n";
    return {"", s, ok ? exit_code::ok : exit_code::internal};
}

/// Classical and effective orbits from the same initial state.
inline CommandResult cmd_evolve(const RunConfig& cfg) {
    const ModelSpec spec = cfg.model();
    const OrbitBlock& ob = detail::require(cfg.orbit, "orbit");
    const OrbitState start{0.0, ob.x, ob.xdot};

    std::optional<double> exit_tau;
    auto run = [&](const auto& model) {
        try {
            return integrate_orbit(model, start, ob.T, ob.dtau);
        } catch (const DomainExit& e) {
            if (!exit_tau || e.exit_tau() < *exit_tau) exit_tau = e.exit_tau();
            return e.partial();
        }
    };
    const Trajectory classical = run(spec);
    const Trajectory effective = run(effective_model(spec));

    detail::CsvWriter csv({"tau", "x_classical", "x_effective", "delta"});
    const std::size_t n = std::min(classical.states.size(), effective.states.size());
    double max_delta = 0.0, max_eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = classical.states[i];
        const double delta = effective.states[i].x - c.x;
        max_delta = std::max(max_delta, std::abs(delta));
        const double w = omega(spec, c.x);
        max_eps = std::max(max_eps, std::abs(omega_slope(spec, c.x) * c.xdot) / (w * w));
        csv.row({c.tau, c.x, effective.states[i].x, delta});
    }
    csv.footer("max_delta", max_delta);
    csv.footer("max_epsilon", max_eps);
    if (!exit_tau) return {csv.str(), "", exit_code::ok};
    csv.footer("exit_tau", *exit_tau);
    return {csv.str(), "orbit left the domain at tau = " + detail::csv_number(*exit_tau) + "\n",
            exit_code::numeric};
}

/// Mass positivity over the domain, with Omega^2 sign as advisory.
inline CommandResult cmd_validate(const RunConfig& cfg) {
    const ModelSpec spec = cfg.model();
    const auto r = validate_model(spec, cfg.validate_samples);
    std::string s;
    s += "samples " + std::to_string(r.x.size()) + "\n";
    s += "min_mass " + detail::csv_number(r.min_mass) + " at x " + detail::csv_number(r.min_mass_at) + "\n";
    s += "mass_positive " + detail::pass_fail(r.mass_positive()) + "\n";
    s += "nonpositive_omega_sq_points " + std::to_string(r.nonpositive_omega_sq) + " (advisory)\n";
    return {"", s, r.mass_positive() ? exit_code::ok : exit_code::numeric};
}

}  // namespace oneloop
