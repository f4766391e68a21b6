#include "fujita/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Semilinear heat equation with a dynamical boundary condition on exterior domains"};
    std::string command;
    std::string config;
    std::string out;
    unsigned jobs = 1;
    app.add_option("command", command, "simulate | exhaust | compare | neumann-mono | verify-supersolution | sweep")
        ->required();
    app.add_option("--config", config, "JSON configuration file")->required();
    app.add_option("--out", out, "output directory (overrides output.dir)");
    app.add_option("--jobs", jobs, "worker threads for sweep")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << fujita::usage(argv[0]);
        return fujita::ConfigInvalid;
    }

    const auto& names = fujita::command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        std::cerr << "unknown command '" << command << "'\n" << fujita::usage(argv[0]);
        return fujita::ConfigInvalid;
    }

    fujita::RunConfig cfg;
    try {
        cfg = fujita::parse_config_file(config);
    } catch (const fujita::ConfigError& e) {
        std::cerr << fujita::violations_json("configuration", e.violations()) << '\n';
        return fujita::ConfigInvalid;
    }
    if (!out.empty())
        cfg.out_dir = out;

    try {
        return fujita::dispatch(command, cfg, jobs, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fujita::InconclusiveRun;
    }
}
