#include <iostream>

#include <CLI11.hpp>

#include "hflat/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for flat H-umbilical Lagrangian submanifolds of quaternion space"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    bool points = false;
    bool strict = false;
    bool serial = false;

    for (const char* name : {"curve", "build", "verify", "structeq"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON configuration file")->required();
        sub->add_option("--out", out, "output directory (overrides output.dir)");
        sub->add_flag("--points", points, "include per-point detail in reports");
        sub->add_flag("--strict-paper", strict, "gate on the ratio normalization sum r_a^-2 = 1");
        sub->add_flag("--serial", serial, "evaluate points on one thread");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hflat::kConfigError;
    }

    hflat::CliOptions options;
    if (!out.empty()) options.out_dir = out;
    options.points = points;
    options.strict_paper = strict;
    options.execution = serial ? hflat::Execution::Serial : hflat::Execution::Parallel;
    return hflat::run_command(app.get_subcommands().front()->get_name(), config, options, std::cout, std::cerr);
}
