#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void add_config_flags(CLI::App* cmd, peerflow::cli::ConfigFlags& f)
{
    cmd->add_option("--config", f.config_path, "Config file of key = value lines");
    cmd->add_option("--system", f.system, "novel, regular or simplified");
    cmd->add_option("--n", f.n, "New manuscripts per issue");
    cmd->add_option("--issues", f.issues, "Number of issues");
    cmd->add_option("--seed", f.seed, "Base RNG seed");
    cmd->add_option("--set", f.sets, "Override any config key (KEY=VALUE, repeatable)");
}

} // namespace

int main(int argc, char** argv)
{
    namespace cli = peerflow::cli;
    CLI::App app{"Peer-review system simulator"};
    app.require_subcommand(1);

    cli::ConfigFlags run_flags;
    std::string run_out = "run";
    auto* run = app.add_subcommand("run", "Simulate one configuration and write its CSV outputs");
    add_config_flags(run, run_flags);
    run->add_option("--out", run_out, "Output directory");

    cli::ConfigFlags sweep_flags;
    cli::SweepFlags sweep_spec;
    std::string sweep_out = "sweep";
    auto* sweep = app.add_subcommand("sweep", "One-at-a-time parameter sweep");
    add_config_flags(sweep, sweep_flags);
    sweep->add_option("--param", sweep_spec.param, "Parameter to vary")->required();
    sweep->add_option("--lo", sweep_spec.lo, "Lowest value")->required();
    sweep->add_option("--hi", sweep_spec.hi, "Highest value")->required();
    sweep->add_option("--step", sweep_spec.step, "Grid step")->required();
    sweep->add_option("--runs", sweep_spec.runs, "Runs per grid point");
    sweep->add_option("--out", sweep_out, "Output directory");

    std::string fig_run_dir;
    std::string fig_id;
    std::string fig_out;
    auto* fig = app.add_subcommand("figdata", "Write the data series behind one figure");
    fig->add_option("run_dir", fig_run_dir, "Run directory holding manifest.json")->required();
    fig->add_option("figure_id", fig_id, "Figure id (1, 3, 4, 5, 6, 7, 8)")->required();
    fig->add_option("--out", fig_out, "Output directory (default: the run directory)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cli::cmd_run(run_flags, run_out, std::cerr);
        if (*sweep) return cli::cmd_sweep(sweep_flags, sweep_spec, sweep_out, std::cerr);
        if (*fig) return cli::cmd_figdata(fig_run_dir, fig_id, fig_out, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
