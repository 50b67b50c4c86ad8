// hmc <command> --config <file> [--set key=value]... [--out <dir>]
//
// Exit status: 0 success, 1 configuration or usage error, 2 file error,
// 3 when `validate` finds a closed-form mismatch.
#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hmc/cli/config.hpp"
#include "hmc/cli/pipelines.hpp"

namespace hmc::cli {

enum ExitCode : int { ok = 0, config_error = 1, io_error = 2, check_failed = 3 };

inline constexpr const char* commands_help =
    "price-european | price-exchange | price-real-option (alias real-option) | simulate | calibrate-garch | validate";

/// Loads, overrides and parses the configuration for `command`.
[[nodiscard]] inline RunConfig load_config(const std::string& command, const std::filesystem::path& config_file,
                                           const std::vector<std::string>& overrides,
                                           const std::optional<std::string>& out_dir) {
    const auto cmd = parse_command(command);
    if (!cmd) throw ConfigError("command", "unknown command '" + command + "' (expected " + commands_help + ")");
    json doc = load_json(config_file);
    for (const auto& o : overrides) apply_override(doc, o);
    if (out_dir) apply_override(doc, "output.dir=" + json(*out_dir).dump());
    return parse_config(doc, *cmd, config_file.parent_path());
}

/// Runs one command; diagnostics go to `err`, progress to `log`.
[[nodiscard]] inline int run(const std::string& command, const std::filesystem::path& config_file,
                             const std::vector<std::string>& overrides, const std::optional<std::string>& out_dir,
                             std::ostream& log, std::ostream& err) {
    try {
        const RunConfig cfg = load_config(command, config_file, overrides, out_dir);
        const std::filesystem::path dir = cfg.output.dir;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
        const Context ctx{cfg, dir, log};
        return run_pipeline(ctx) ? ok : check_failed;
    } catch (const ConfigError& e) {
        err << "hmc: config error in " << e.what() << '\n';
        return config_error;
    } catch (const IoError& e) {
        err << "hmc: I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const ParseError& e) {
        err << "hmc: input error: " << e.what() << '\n';
        return io_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "hmc: I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const std::exception& e) {
        err << "hmc: error: " << e.what() << '\n';
        return config_error;
    }
}

[[nodiscard]] inline int main(int argc, char** argv) {
    CLI::App app{"Hedged Monte Carlo valuation of European claims and real options"};
    std::string command, config;
    std::vector<std::string> overrides;
    std::string out;
    app.add_option("command", command, commands_help)->required();
    app.add_option("-c,--config", config, "JSON configuration file")->required();
    app.add_option("--set", overrides, "override a configuration value, key.path=value")->allow_extra_args(false);
    app.add_option("-o,--out", out, "output directory (overrides output.dir)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return config_error;
    }
    return run(command, config, overrides, out.empty() ? std::nullopt : std::optional<std::string>(out), std::cout,
               std::cerr);
}

}  // namespace hmc::cli
