#include "nlgame/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Game contract pricing in nonlinear markets on a binomial lattice"};
    app.require_subcommand(1);

    nlgame::cli::CommandRequest req;
    std::string out_dir;
    app.add_option("--config", req.config_path, "Run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "Output directory, overrides output.dir");
    app.add_option("--workers", req.workers, "Worker threads for the oracle and sweeps")->check(CLI::PositiveNumber);
    app.add_option("--tol-override", req.tol_overrides, "Tolerance override key=value (repeatable)");

    app.add_subcommand("price", "Acceptable price, solution fields and stopping regions");
    app.add_subcommand("oracle", "Brute-force Dynkin game values against the reflected solution");
    app.add_subcommand("replicate", "Forward replication battery with epsilon probes");
    app.add_subcommand("regions", "Export the four stopping regions only");
    auto* sweep = app.add_subcommand("sweep", "Prices of both parties along one numeric config leaf");
    sweep->add_option("--axis", req.sweep_axis, "Dotted config path, e.g. contract.penalty")->required();
    sweep->add_option("--values", req.sweep_values, "Values in output order")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nlgame::cli::kConfigError;
    }
    req.command = app.get_subcommands().front()->get_name();
    if (!out_dir.empty()) req.out_dir = out_dir;
    return nlgame::cli::run_command(req);
}
