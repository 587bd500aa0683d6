// Command-line front-end for the sweep drivers.
//
// Subcommands: steady-state, stability-map, entangle-sweep, variance-sweep.
// Each reads a JSON config (--config), writes a CSV (--out) plus a JSON
// summary next to it (<out stem>.summary.json).  Exit code is 0 when the
// run completes (cell-level failures are row status codes in the CSV) and
// 1 on config or I/O errors.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "levmir/levmir.hpp"

int main(int argc, char** argv) {
    CLI::App app{"levmir: levitated-mirror cavity optomechanics sweeps"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string branch_str = "blue";
    int threads = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output CSV path")->required();
        sub->add_option("--threads", threads, "worker pool width (default 1)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--branch", branch_str, "steady-state branch (default blue)")
            ->check(CLI::IsMember({"blue", "red"}));
    };

    CLI::App* cmd_steady = app.add_subcommand("steady-state", "semiclassical branch report with residuals and threshold");
    CLI::App* cmd_map = app.add_subcommand("stability-map", "stability verdicts over a (kappa, Gamma) grid");
    CLI::App* cmd_ent = app.add_subcommand("entangle-sweep", "Renyi-2 entanglement entropy over (p_tilde, omega)");
    CLI::App* cmd_var = app.add_subcommand("variance-sweep", "output quadrature variances and squeezing over (p_tilde, omega)");
    for (CLI::App* sub : {cmd_steady, cmd_map, cmd_ent, cmd_var}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        levmir::sweep_config cfg = levmir::load_config(config_path);
        cfg.threads = threads;
        cfg.branch = branch_str == "red" ? levmir::branch_label::red : levmir::branch_label::blue;

        levmir::table_output out;
        if (cmd_steady->parsed()) {
            out = levmir::run_steady_state_report(cfg);
        } else if (cmd_map->parsed()) {
            out = levmir::run_stability_map(cfg);
        } else if (cmd_ent->parsed()) {
            out = levmir::run_entanglement_sweep(cfg);
        } else {
            out = levmir::run_variance_sweep(cfg);
        }
        levmir::write_outputs(out_path, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
