#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biruin/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Finite-time ruin probabilities of a bidimensional perturbed risk model"};
    app.require_subcommand(1, 1);

    biruin::RunSpec spec;
    std::string out_path;
    for (const char* name : {"simulate", "asymptotics", "study", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", spec.config_path, "Config file (key = value lines)")->required();
        sub->add_option("--set", spec.overrides, "Override a config key: key=value")->take_all();
        sub->add_option("--out", out_path, "Output file (default: standard output)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : biruin::kExitConfig;
    }

    spec.command = *biruin::parse_command(app.get_subcommands().front()->get_name());
    if (!out_path.empty()) spec.out_path = out_path;
    return biruin::run(spec, std::cout, std::cerr);
}
