#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "funcov/cli.hpp"

namespace {

void add_common(CLI::App* cmd, funcov::cli::CommonConfig& common) {
    cmd->add_option("--pve", common.pve, "variance-explained threshold for K")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))
        ->capture_default_str();
    cmd->add_option("--permutations", common.permutations,
                    "permutation replicates (0 disables for the independent test)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--seed", common.seed, "master random seed")->capture_default_str();
    cmd->add_option("--threads", common.threads, "worker threads (0 = auto)")
        ->capture_default_str();
    cmd->add_option("--alpha", common.alpha, "rejection level")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12))
        ->capture_default_str();
    cmd->add_option("--out", common.out_path, "output file (default: stdout)");
    cmd->add_option("--format", common.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample and multi-group covariance tests for functional data"};
    app.require_subcommand(1);

    funcov::cli::TestConfig test_cfg;
    std::string grid_path;
    auto* test_cmd = app.add_subcommand(
        "test", "two-sample covariance test from two-sample CSV input");
    test_cmd->add_option("inputs", test_cfg.inputs, "input CSV file(s)")
        ->required()
        ->expected(1, 2);
    test_cmd->add_option("--grid", grid_path, "file with the T grid timepoints");
    test_cmd->add_flag("--paired", test_cfg.paired,
                       "paired test (input needs the pair_id column)");
    test_cmd->add_flag("--full-pipeline-permutation",
                       test_cfg.full_pipeline_permutation,
                       "re-run demeaning and pooled FPCA inside every permutation");
    add_common(test_cmd, test_cfg.common);

    funcov::cli::SimulateConfig sim_cfg;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "empirical size/power sweep over a synthetic design");
    sim_cmd->add_option("--design", sim_cfg.design,
                        "independent, paired or supplement")
        ->required();
    sim_cmd->add_option("--gamma", sim_cfg.gamma, "shared third-eigenvalue grid");
    sim_cmd->add_option("--delta", sim_cfg.delta, "effect-size grid");
    sim_cmd->add_option("--rho", sim_cfg.rho, "within-pair correlation grid");
    sim_cmd->add_option("--scenario", sim_cfg.scenario,
                        "supplement scenarios: null, orthogonal, non-orthogonal");
    sim_cmd->add_option("--n", sim_cfg.n, "per-group sample-size grid");
    sim_cmd->add_option("--sigma2", sim_cfg.sigma2, "noise-variance grid");
    sim_cmd->add_option("--replicates", sim_cfg.replicates, "datasets per cell")
        ->capture_default_str();
    sim_cmd->add_option("--grid-points", sim_cfg.n_grid, "observation points per curve")
        ->capture_default_str();
    add_common(sim_cmd, sim_cfg.common);
    sim_cfg.common.format = "csv";
    sim_cmd->get_option("--format")->default_str("csv");

    funcov::cli::GlobalConfig global_cfg;
    global_cfg.common.permutations = 200;
    auto* global_cmd = app.add_subcommand(
        "global", "all-pairwise paired tests plus CvM permutation summary");
    global_cmd->add_option("input", global_cfg.input, "trial CSV file")->required();
    global_cmd
        ->add_option("--global-permutations", global_cfg.global_permutations,
                     "trial-label permutation replicates")
        ->capture_default_str();
    global_cmd->add_flag("--asymptotic", global_cfg.asymptotic_pairwise,
                         "use asymptotic pairwise p-values instead of permutation");
    add_common(global_cmd, global_cfg.common);
    global_cmd->get_option("--permutations")->default_str("200");

    funcov::cli::GenerateConfig gen_cfg;
    auto* gen_cmd =
        app.add_subcommand("generate", "write one simulated dataset as CSV");
    gen_cmd->add_option("--design", gen_cfg.design, "independent, paired or supplement")
        ->required();
    gen_cmd->add_option("--gamma", gen_cfg.gamma, "shared third eigenvalue")
        ->capture_default_str();
    gen_cmd->add_option("--delta", gen_cfg.delta, "effect size")->capture_default_str();
    gen_cmd->add_option("--rho", gen_cfg.rho, "within-pair correlation")
        ->capture_default_str();
    gen_cmd->add_option("--scenario", gen_cfg.scenario, "supplement scenario")
        ->capture_default_str();
    gen_cmd->add_option("--n", gen_cfg.n, "curves (or pairs) per group")
        ->capture_default_str();
    gen_cmd->add_option("--grid-points", gen_cfg.n_grid, "observation points per curve")
        ->capture_default_str();
    gen_cmd->add_option("--sigma2", gen_cfg.sigma2, "noise variance")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen_cfg.seed, "master random seed")
        ->capture_default_str();
    gen_cmd->add_option("--out", gen_cfg.out_path, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (test_cmd->parsed()) {
        if (!grid_path.empty()) test_cfg.grid_path = grid_path;
        return funcov::cli::run_test(test_cfg, std::cout, std::cerr);
    }
    if (sim_cmd->parsed()) return funcov::cli::run_simulate(sim_cfg, std::cout, std::cerr);
    if (global_cmd->parsed())
        return funcov::cli::run_global(global_cfg, std::cout, std::cerr);
    if (gen_cmd->parsed())
        return funcov::cli::run_generate(gen_cfg, std::cout, std::cerr);
    return 2;
}
