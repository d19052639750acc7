#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccv/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"CCV-QAOA: continuous-variable variational optimization over complex variables"};
    app.require_subcommand(1);

    ccv::harness::CliOptions opts;
    std::string axis;
    std::vector<double> values;
    std::string result_path;
    int mode = 0;

    const auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opts.config_path, "experiment config file (JSON)");
        if (needs_config) c->required();
        sub->add_option("--seed", [&opts](const std::vector<std::string>& vals) {
            opts.seed = std::stoull(vals.front());
            return true;
        }, "override the run seed");
        sub->add_option("--jobs", opts.jobs, "worker pool size for sweep cells")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--dry-run", opts.dry_run, "validate and print the resolved config only");
    };

    auto* run = app.add_subcommand("run", "execute one experiment");
    add_common(run, true);

    auto* sweep = app.add_subcommand("sweep", "grid execution over an axis");
    add_common(sweep, true);
    sweep->add_option("--axis", axis, "depth | size | cutoff")->required();
    sweep->add_option("--values", values, "axis values")->required()->expected(-1);

    auto* compare = app.add_subcommand("compare", "paired CCV vs CV-baseline benchmark");
    add_common(compare, true);

    auto* wig = app.add_subcommand("wigner", "Wigner grid from a result snapshot");
    wig->add_option("--result", result_path, "path to result.json")->required();
    wig->add_option("--mode", mode, "mode index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ccv::harness::kExitConfig;
    }

    if (run->parsed()) return ccv::harness::cmd_run(opts);
    if (sweep->parsed()) return ccv::harness::cmd_sweep(opts, axis, values);
    if (compare->parsed()) return ccv::harness::cmd_compare(opts);
    if (wig->parsed()) return ccv::harness::cmd_wigner(result_path, mode);
    return ccv::harness::kExitConfig;
}
