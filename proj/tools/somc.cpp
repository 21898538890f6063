// somc.cpp — command-line entry point

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "somc/runner.hpp"

namespace {

int report(int code, std::string_view kind, const std::string& msg) {
    nlohmann::json e{{"error", kind}, {"message", msg}, {"exit_code", code}};
    std::cerr << e.dump() << '\n';
    return code;
}

// "--a.b=v" style flags, and "--key=v" for keys that are not CLI options, are config
// overrides; CLI11 never sees them.
bool is_override(const std::string& a) {
    if (a.rfind("--", 0) != 0) return false;
    const auto eq = a.find('=');
    if (eq == std::string::npos) return false;
    const std::string key = a.substr(2, eq - 2);
    return key != "config" && key != "out" && key != "seed" && key != "threads";
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> overrides, rest;
    for (int i = 1; i < argc; ++i) (is_override(argv[i]) ? overrides : rest).emplace_back(argv[i]);

    CLI::App app{"Spin-optomechanics lattice calculations"};
    app.set_version_flag("--version", somc::tool_version);
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: output_path from the config)");
    app.add_option("--seed", seed, "base seed for random draws");
    app.add_option("--threads", threads, "worker threads for sweeps (0 = all cores)");
    app.require_subcommand(1);
    for (const auto& name : somc::subcommands()) app.add_subcommand(name, "emit " + name + " tables")->fallthrough();

    std::vector<std::string> args(rest.rbegin(), rest.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(2, "ParseError", e.what());
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        auto cfg = somc::parse_config(config_path.empty() ? std::nullopt : std::optional{config_path}, overrides);
        if (!out_dir.empty()) cfg.output_path = out_dir;
        if (seed) cfg.seed = *seed;
        if (threads) {
            if (*threads < 0) somc::fail(somc::ErrorKind::ValidationError, "--threads must be >= 0");
            cfg.threads = *threads;
        }
        const auto tables = somc::run_command(command, cfg);
        auto resolved = somc::to_json(cfg);
        resolved["command"] = command;
        std::vector<std::pair<std::string, std::string>> rendered;
        for (const auto& [file, table] : tables) rendered.emplace_back(file, table.render(resolved, somc::tool_version));
        std::filesystem::create_directories(cfg.output_path);
        for (const auto& [file, text] : rendered) {
            const auto path = std::filesystem::path(cfg.output_path) / file;
            std::FILE* f = std::fopen(path.c_str(), "wb");
            if (!f) return report(3, "IoError", "cannot write " + path.string());
            std::fwrite(text.data(), 1, text.size(), f);
            std::fclose(f);
            std::cout << path.string() << '\n';
        }
    } catch (const somc::Error& e) {
        return report(e.is_config_error() ? 2 : 3, somc::to_string(e.kind()), e.detail());
    } catch (const std::exception& e) {
        return report(3, "InternalError", e.what());
    }
    return 0;
}
