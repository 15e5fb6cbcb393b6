// oneloop <eval|tracelog|reparam|evolve|validate> --config <path> [--out <path>]
//         [--hbar <real>] [--grid-n <int>]

#include "oneloop/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

oneloop::CommandResult dispatch(const std::string& command, const oneloop::RunConfig& cfg) {
    if (command == "eval") return oneloop::cmd_eval(cfg);
    if (command == "tracelog") return oneloop::cmd_tracelog(cfg);
    if (command == "reparam") return oneloop::cmd_reparam(cfg);
    if (command == "evolve") return oneloop::cmd_evolve(cfg);
    return oneloop::cmd_validate(cfg);
}

int run(const std::string& command, const std::string& config_path, const std::string& out_path,
        std::optional<double> hbar, std::optional<std::size_t> grid_n) {
    oneloop::RunConfig cfg = oneloop::load_config(config_path);
    if (hbar) {
        if (!(*hbar >= 0.0)) throw oneloop::ConfigError("--hbar", "must be non-negative");
        cfg.hbar = *hbar;
    }
    if (grid_n) {
        if (!cfg.grid) throw oneloop::ConfigError("--grid-n", "config has no [grid] section");
        if (*grid_n < 16) throw oneloop::ConfigError("--grid-n", "must be at least 16");
        cfg.grid->N = *grid_n;
    }

    const oneloop::CommandResult result = dispatch(command, cfg);

    if (!result.csv.empty()) {
        if (out_path.empty()) {
            std::cout << result.csv;
            std::cerr << result.summary;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw oneloop::ConfigError("--out", "cannot open '" + out_path + "' for writing");
            out << result.csv;
            if (!out.flush()) throw oneloop::ConfigError("--out", "write to '" + out_path + "' failed");
            std::cout << result.summary;
        }
    } else {
        std::cout << result.summary;
        if (!out_path.empty()) {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw oneloop::ConfigError("--out", "cannot open '" + out_path + "' for writing");
            out << result.summary;
        }
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-loop covariant effective action: sweeps, trace-log checks, orbits."};
    std::string command, config_path, out_path;
    std::optional<double> hbar;
    std::optional<std::size_t> grid_n;
    app.add_option("command", command, "eval | tracelog | reparam | evolve | validate")
        ->required()
        ->check(CLI::IsMember({"eval", "tracelog", "reparam", "evolve", "validate"}));
    app.add_option("--config", config_path, "run configuration file")->required();
    app.add_option("--out", out_path, "write CSV here instead of stdout");
    app.add_option("--hbar", hbar, "override model.hbar");
    app.add_option("--grid-n", grid_n, "override grid.N");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : oneloop::exit_code::config;
    }

    try {
        return run(command, config_path, out_path, hbar, grid_n);
    } catch (const oneloop::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return oneloop::exit_code::config;
    } catch (const oneloop::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return oneloop::exit_code::config;
    } catch (const oneloop::DomainError& e) {
        std::cerr << "numeric domain error: " << e.what() << '\n';
        return oneloop::exit_code::numeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return oneloop::exit_code::internal;
    }
}
