#include <cstdint>
#include <iostream>
#include <string>

#include "droneplan/cli_cmds.hpp"
#include "vendor/CLI11.hpp"

namespace {

struct CommonArgs {
    std::string scenario;
    double step_size = 0.0;
    double lambda0 = 0.0;
    double merge_threshold = 0.0;
    std::string ordering;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
    cmd->add_option("scenario", args->scenario, "scenario JSON file")->required();
    cmd->add_option("--step", args->step_size, "override integration step size");
    cmd->add_option("--lambda0", args->lambda0, "override initial multiplier magnitude");
    cmd->add_option("--merge-threshold", args->merge_threshold, "override merge threshold");
    cmd->add_option("--ordering", args->ordering, "override ordering (exact|heuristic|as-given)");
    cmd->add_option("--seed", args->seed, "override random seed");
}

droneplan::CliOverrides overrides_of(const CLI::App* cmd, const CommonArgs& args) {
    droneplan::CliOverrides ov;
    if (cmd->count("--step") > 0) ov.step_size = args.step_size;
    if (cmd->count("--lambda0") > 0) ov.lambda0 = args.lambda0;
    if (cmd->count("--merge-threshold") > 0) ov.merge_threshold = args.merge_threshold;
    if (cmd->count("--ordering") > 0) ov.ordering = args.ordering;
    if (cmd->count("--seed") > 0) ov.seed = args.seed;
    return ov;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locally optimal drone harvesting paths under a path-length budget"};
    app.require_subcommand(1);

    CommonArgs plan_args, sweep_args, validate_args;
    double target = 0.0;
    std::string plan_out = ".", sweep_out = ".";

    CLI::App* plan = app.add_subcommand("plan", "plan a path for one target length");
    add_common(plan, &plan_args);
    plan->add_option("--target", target, "target path length")->required();
    plan->add_option("--out", plan_out, "output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep from the full tour down to merge");
    add_common(sweep, &sweep_args);
    sweep->add_option("--out", sweep_out, "output directory");

    CLI::App* validate = app.add_subcommand("validate", "run the validation suites");
    add_common(validate, &validate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : droneplan::kExitParse;
    }

    if (plan->parsed()) {
        return droneplan::cmd_plan(plan_args.scenario, target, plan_out,
                                   overrides_of(plan, plan_args), std::cout, std::cerr);
    }
    if (sweep->parsed()) {
        return droneplan::cmd_sweep(sweep_args.scenario, sweep_out,
                                    overrides_of(sweep, sweep_args), std::cout, std::cerr);
    }
    return droneplan::cmd_validate(validate_args.scenario, overrides_of(validate, validate_args),
                                   std::cout, std::cerr);
}
