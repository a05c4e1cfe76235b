// hotplate - serpentine micro-hotplate design and analysis toolkit
//
// Subcommands: analytic, solve, calibrate, oven, materials.
// Exit codes: 0 success, 2 configuration error, 3 solver error, 1 other.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "hotplate/runner.hpp"
#include "hotplate/scenario.hpp"
#include "hotplate/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"serpentine micro-hotplate electro-thermal toolkit"};
    app.set_version_flag("--version", std::string("hotplate ") + hotplate::version_string);
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string scenario_path;
    std::string out_dir = "out";
    int threads = 0;  // 0 = take the scenario's value
    bool quiet = false;

    app.add_option("--scenario", scenario_path, "scenario config file")->required();
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--threads", threads, "worker threads (overrides the scenario)");
    app.add_flag("--quiet", quiet, "suppress console report");

    const char* names[] = {"analytic", "solve", "calibrate", "oven", "materials"};
    const char* descs[] = {
        "closed-form heater report (resistance, midpoint temperature)",
        "voxelize and run the electrical + thermal field solves",
        "fit calibration polynomials and write model files",
        "compensated vs uncompensated ambient sweeps",
        "print the effective material table",
    };
    for (int i = 0; i < 5; ++i) app.add_subcommand(names[i], descs[i]);

    CLI11_PARSE(app, argc, argv);

    hotplate::RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.quiet = quiet;
    ctx.log = &std::cout;

    hotplate::Scenario sc;
    try {
        sc = hotplate::parse_scenario(scenario_path);
    } catch (const std::exception& e) {
        std::cout << "config error: " << e.what() << "\n";
        return hotplate::exit_config_error;
    }
    if (threads > 0) sc.threads = threads;

    if (!quiet) {
        std::cout << "# resolved scenario (" << sc.hash_hex << ")\n";
        for (const auto& [k, v] : sc.resolved) std::cout << k << " = " << v << "\n";
    }

    std::string command = app.get_subcommands().front()->get_name();
    return hotplate::run_command(command, sc, ctx);
}
