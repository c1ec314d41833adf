#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "funcov/csv.hpp"
#include "funcov/errors.hpp"
#include "funcov/global_test.hpp"
#include "funcov/independent_test.hpp"
#include "funcov/paired_test.hpp"
#include "funcov/parallel.hpp"
#include "funcov/result_json.hpp"
#include "funcov/simulate.hpp"

// Command implementations behind the CLI front end. Each run_* function
// returns a process exit code: 0 success, 2 malformed input, 3 numerical
// failure. Results go to `out` (stdout or --out file); progress and
// diagnostics go to `err` only, so pipelines stay clean.

namespace funcov::cli {

struct CommonConfig {
    double pve = 0.99;
    int permutations = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double alpha = 0.05;
    std::string out_path; // empty = stdout
    std::string format = "json";
};

struct TestConfig {
    std::vector<std::string> inputs;
    std::optional<std::string> grid_path;
    bool paired = false;
    bool full_pipeline_permutation = false;
    CommonConfig common;
};

struct SimulateConfig {
    std::string design = "independent"; // independent | paired | supplement
    std::vector<double> gamma{0.0};
    std::vector<double> delta{0.0};
    std::vector<double> rho{0.5};
    std::vector<std::string> scenario{"null"};
    std::vector<int> n{100};
    std::vector<double> sigma2{0.25};
    int replicates = 500;
    int n_grid = 200;
    CommonConfig common;
};

struct GlobalConfig {
    std::string input;
    int global_permutations = 200;
    bool asymptotic_pairwise = false;
    CommonConfig common; // common.permutations is the per-pair count
};

struct GenerateConfig {
    std::string design = "independent";
    double gamma = 0.5;
    double delta = 0.0;
    double rho = 0.5;
    double sigma2 = 0.25;
    std::string scenario = "null";
    int n = 100;
    int n_grid = 200;
    std::uint64_t seed = 1;
    std::string out_path;
};

namespace detail {

class OutputTarget {
public:
    explicit OutputTarget(const std::string& path, std::ostream& fallback)
        : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw input_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

inline int guard(std::ostream& err, const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const input_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

inline SupplementScenario parse_scenario(const std::string& name) {
    if (name == "null") return SupplementScenario::null_same;
    if (name == "orthogonal") return SupplementScenario::orthogonal;
    if (name == "non-orthogonal" || name == "non_orthogonal")
        return SupplementScenario::non_orthogonal;
    throw input_error("unknown scenario '" + name +
                      "' (expected null, orthogonal or non-orthogonal)");
}

inline void write_test_result(std::ostream& out, const TestResult& r,
                              const std::string& format) {
    if (format == "json") {
        out << to_json(r).dump(2) << "\n";
    } else if (format == "csv") {
        out << "statistic,k,argmax_p,argmax_q,p_asymptotic,p_permutation,"
               "n1,n2,permutations,seed,pve_achieved\n";
        out << csv::format_double(r.statistic) << ',' << r.k << ',' << r.argmax_p << ','
            << r.argmax_q << ',';
        if (r.p_asymptotic) out << csv::format_double(*r.p_asymptotic);
        out << ',';
        if (r.p_permutation) out << csv::format_double(*r.p_permutation);
        out << ',' << r.n1 << ',' << r.n2 << ',' << r.permutations << ',' << r.seed
            << ',' << csv::format_double(r.pve_achieved) << "\n";
    } else {
        throw input_error("unknown format '" + format + "' (expected json or csv)");
    }
}

} // namespace detail

/// `test`: two-sample covariance test on CSV input.
inline int run_test(const TestConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guard(err, [&] {
        std::optional<Grid> grid;
        if (cfg.grid_path) grid = csv::parse_grid_file(*cfg.grid_path);
        const csv::TwoSampleData data = csv::parse_two_sample_csv(cfg.inputs, grid);
        if (cfg.paired && (!data.group1.has_pairs() || !data.group2.has_pairs()))
            throw input_error("paired mode requires pair_id");

        TestOptions opt;
        opt.pve = cfg.common.pve;
        opt.permutations = cfg.common.permutations;
        opt.seed = cfg.common.seed;
        opt.threads = cfg.common.threads;
        opt.full_pipeline_permutation = cfg.full_pipeline_permutation;

        const TestResult result = cfg.paired
                                      ? test_paired(data.group1, data.group2, opt)
                                      : test_independent(data.group1, data.group2, opt);
        detail::OutputTarget target(cfg.common.out_path, out);
        detail::write_test_result(target.stream(), result, cfg.common.format);
    });
}

namespace detail {

struct SimCell {
    double gamma = 0.0, delta = 0.0, rho = 0.0, sigma2 = 0.25;
    std::string scenario;
    int n = 0;
};

struct SimRow {
    std::string design;
    std::string param; // gamma | rho | scenario value
    std::string delta; // empty for the supplement design
    int n = 0;
    double sigma2 = 0.25;
    int replicates = 0;
    double rejection_rate = 0.0;
    double mean_k = 0.0;
    std::uint64_t seed = 0;
};

// One replicate of a simulate cell; returns {paired rejected?, independent
// rejected?, K}. For non-paired designs only the independent flag is used.
struct ReplicateOutcome {
    bool reject_paired = false;
    bool reject_independent = false;
    int k = 0;
};

inline double pvalue_for_rejection(const PooledFpca& f, const Eigen::MatrixXd& s1,
                                   const Eigen::MatrixXd& s2, bool paired,
                                   const CommonConfig& common, std::uint64_t rep_seed) {
    if (paired) {
        const PairedScores ps(s1, s2);
        return permutation_pvalue_paired(ps, common.permutations, rep_seed, 1).p;
    }
    if (common.permutations > 0)
        return permutation_pvalue_independent(s1, s2, common.permutations, rep_seed, 1).p;
    const ScoreCovariance c1 = score_covariance(s1);
    const ScoreCovariance c2 = score_covariance(s2);
    return asymptotic_pvalue(statistic_independent(c1, c2).value, f.k);
}

} // namespace detail

/// `simulate`: empirical rejection-rate sweeps over the synthetic designs.
/// Emits one CSV/JSON row per grid cell (the paired design emits a second
/// row per cell with the independent test run on the same datasets).
inline int run_simulate(const SimulateConfig& cfg, std::ostream& out,
                        std::ostream& err) {
    return detail::guard(err, [&] {
        const CommonConfig& common = cfg.common;
        if (cfg.replicates < 1) throw input_error("replicates must be >= 1");
        if (common.permutations < 1 && cfg.design == "paired")
            throw input_error("the paired design needs permutations >= 1");
        for (int n : cfg.n)
            if (n < 2) throw input_error("sample size must be >= 2");
        for (double s : cfg.sigma2)
            if (s < 0.0) throw input_error("sigma2 must be non-negative");

        std::vector<detail::SimCell> cells;
        if (cfg.design == "independent") {
            for (double g : cfg.gamma)
                for (double d : cfg.delta)
                    for (int n : cfg.n)
                        for (double s : cfg.sigma2)
                            cells.push_back({g, d, 0.0, s, "", n});
        } else if (cfg.design == "paired") {
            for (double r : cfg.rho)
                for (double d : cfg.delta)
                    for (int n : cfg.n)
                        for (double s : cfg.sigma2)
                            cells.push_back({0.5, d, r, s, "", n});
        } else if (cfg.design == "supplement") {
            for (const auto& sc : cfg.scenario)
                for (int n : cfg.n)
                    for (double s : cfg.sigma2) {
                        detail::parse_scenario(sc);
                        detail::SimCell c;
                        c.scenario = sc;
                        c.sigma2 = s;
                        c.n = n;
                        cells.push_back(c);
                    }
        } else {
            throw input_error("unknown design '" + cfg.design +
                              "' (expected independent, paired or supplement)");
        }

        std::vector<detail::SimRow> rows;
        const std::size_t n_reps = static_cast<std::size_t>(cfg.replicates);
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            const detail::SimCell& cell = cells[ci];
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<detail::ReplicateOutcome> outcomes(n_reps);

            parallel_for(n_reps, common.threads, [&](std::size_t r) {
                const std::uint64_t rep_seed =
                    rng::derive(common.seed, {rng::stream::sim_replicate, ci, r});
                detail::ReplicateOutcome& res = outcomes[r];
                if (cfg.design == "independent") {
                    IndependentSimConfig gen;
                    gen.gamma = cell.gamma;
                    gen.delta = cell.delta;
                    gen.n_per_group = cell.n;
                    gen.n_grid = static_cast<std::size_t>(cfg.n_grid);
                    gen.noise_var = cell.sigma2;
                    gen.seed = rep_seed;
                    const auto [g1, g2] = gen_independent(gen);
                    const PooledFpca f = pooled_fpca(g1, g2, common.pve);
                    res.k = f.k;
                    res.reject_independent =
                        detail::pvalue_for_rejection(f, f.scores_g1, f.scores_g2, false,
                                                     common, rep_seed) <= common.alpha;
                } else if (cfg.design == "paired") {
                    PairedSimConfig gen;
                    gen.rho = cell.rho;
                    gen.delta = cell.delta;
                    gen.n_pairs = cell.n;
                    gen.n_grid = static_cast<std::size_t>(cfg.n_grid);
                    gen.noise_var = cell.sigma2;
                    gen.seed = rep_seed;
                    const auto [g1, g2] = gen_paired(gen);
                    const PooledFpca f = pooled_fpca(g1, g2, common.pve);
                    res.k = f.k;
                    res.reject_paired =
                        detail::pvalue_for_rejection(f, f.scores_g1, f.scores_g2, true,
                                                     common, rep_seed) <= common.alpha;
                    res.reject_independent =
                        detail::pvalue_for_rejection(f, f.scores_g1, f.scores_g2, false,
                                                     common, rep_seed) <= common.alpha;
                } else {
                    SupplementSimConfig gen;
                    gen.scenario = detail::parse_scenario(cell.scenario);
                    gen.noise_var = cell.sigma2;
                    gen.n_per_group = cell.n;
                    gen.n_grid = static_cast<std::size_t>(cfg.n_grid);
                    gen.seed = rep_seed;
                    const auto [g1, g2] = gen_supplement(gen);
                    const PooledFpca f = pooled_fpca(g1, g2, common.pve);
                    res.k = f.k;
                    res.reject_independent =
                        detail::pvalue_for_rejection(f, f.scores_g1, f.scores_g2, false,
                                                     common, rep_seed) <= common.alpha;
                }
            });

            std::size_t rej_primary = 0, rej_secondary = 0;
            long long k_sum = 0;
            for (const auto& o : outcomes) {
                rej_primary += cfg.design == "paired" ? o.reject_paired
                                                      : o.reject_independent;
                rej_secondary += o.reject_independent;
                k_sum += o.k;
            }
            const double mean_k =
                static_cast<double>(k_sum) / static_cast<double>(n_reps);

            detail::SimRow row;
            row.design = cfg.design;
            row.param = cfg.design == "independent" ? csv::format_double(cell.gamma)
                        : cfg.design == "paired"    ? csv::format_double(cell.rho)
                                                    : cell.scenario;
            row.delta = cfg.design == "supplement" ? "" : csv::format_double(cell.delta);
            row.n = cell.n;
            row.sigma2 = cell.sigma2;
            row.replicates = cfg.replicates;
            row.rejection_rate =
                static_cast<double>(rej_primary) / static_cast<double>(n_reps);
            row.mean_k = mean_k;
            row.seed = common.seed;
            rows.push_back(row);
            if (cfg.design == "paired") {
                detail::SimRow indep = row;
                indep.design = "paired_independent";
                indep.rejection_rate =
                    static_cast<double>(rej_secondary) / static_cast<double>(n_reps);
                rows.push_back(indep);
            }

            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            err << "cell " << (ci + 1) << "/" << cells.size() << " done in " << elapsed
                << "s\n";
        }

        detail::OutputTarget target(common.out_path, out);
        std::ostream& os = target.stream();
        const std::string param_name = cfg.design == "independent" ? "gamma"
                                       : cfg.design == "paired"    ? "rho"
                                                                   : "scenario";
        if (common.format == "csv") {
            os << "design," << param_name
               << ",delta,n,sigma2,replicates,rejection_rate,mean_K,seed\n";
            for (const auto& r : rows)
                os << r.design << ',' << r.param << ',' << r.delta << ',' << r.n << ','
                   << csv::format_double(r.sigma2) << ',' << r.replicates << ','
                   << csv::format_double(r.rejection_rate) << ','
                   << csv::format_double(r.mean_k) << ',' << r.seed << "\n";
        } else if (common.format == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : rows) {
                nlohmann::json row{{"design", r.design},
                                   {param_name, r.param},
                                   {"n", r.n},
                                   {"sigma2", r.sigma2},
                                   {"replicates", r.replicates},
                                   {"rejection_rate", r.rejection_rate},
                                   {"mean_K", r.mean_k},
                                   {"seed", r.seed}};
                if (!r.delta.empty()) row["delta"] = std::stod(r.delta);
                j.push_back(row);
            }
            os << j.dump(2) << "\n";
        } else {
            throw input_error("unknown format '" + common.format +
                              "' (expected json or csv)");
        }
    });
}

/// `global`: all-pairwise paired tests plus the CvM permutation summary.
inline int run_global(const GlobalConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guard(err, [&] {
        const TrialDataset ds = csv::parse_trial_csv(cfg.input);
        err << "parsed " << ds.n_trials() << " trials x " << ds.n_neurons()
            << " neurons x " << ds.grid.size() << " timepoints\n";

        GlobalOptions opt;
        opt.pve = cfg.common.pve;
        opt.per_pair_permutations = cfg.common.permutations;
        opt.global_permutations = cfg.global_permutations;
        opt.seed = cfg.common.seed;
        opt.threads = cfg.common.threads;
        opt.asymptotic_pairwise = cfg.asymptotic_pairwise;
        opt.alpha = cfg.common.alpha;

        const GlobalResult result = global_test(ds, opt);
        detail::OutputTarget target(cfg.common.out_path, out);
        std::ostream& os = target.stream();
        if (cfg.common.format == "json") {
            os << to_json(result).dump(2) << "\n";
        } else if (cfg.common.format == "csv") {
            // tabular export carries the pairwise p-values only; use json
            // for the full result
            os << "trial_a,trial_b,p_value\n";
            std::size_t idx = 0;
            for (std::size_t a = 0; a < ds.n_trials(); ++a)
                for (std::size_t b = a + 1; b < ds.n_trials(); ++b, ++idx)
                    os << ds.trial_ids[a] << ',' << ds.trial_ids[b] << ','
                       << csv::format_double(result.pairwise_pvalues[idx]) << "\n";
        } else {
            throw input_error("unknown format '" + cfg.common.format +
                              "' (expected json or csv)");
        }
    });
}

/// `generate`: write one simulated two-sample dataset as CSV.
inline int run_generate(const GenerateConfig& cfg, std::ostream& out,
                        std::ostream& err) {
    return detail::guard(err, [&] {
        detail::OutputTarget target(cfg.out_path, out);
        if (cfg.design == "independent") {
            IndependentSimConfig gen;
            gen.gamma = cfg.gamma;
            gen.delta = cfg.delta;
            gen.n_per_group = cfg.n;
            gen.n_grid = static_cast<std::size_t>(cfg.n_grid);
            gen.noise_var = cfg.sigma2;
            gen.seed = cfg.seed;
            const auto [g1, g2] = gen_independent(gen);
            csv::write_two_sample_csv(target.stream(), g1, g2);
        } else if (cfg.design == "paired") {
            PairedSimConfig gen;
            gen.rho = cfg.rho;
            gen.delta = cfg.delta;
            gen.n_pairs = cfg.n;
            gen.n_grid = static_cast<std::size_t>(cfg.n_grid);
            gen.noise_var = cfg.sigma2;
            gen.seed = cfg.seed;
            const auto [g1, g2] = gen_paired(gen);
            csv::write_two_sample_csv(target.stream(), g1, g2);
        } else if (cfg.design == "supplement") {
            SupplementSimConfig gen;
            gen.scenario = detail::parse_scenario(cfg.scenario);
            gen.noise_var = cfg.sigma2;
            gen.n_per_group = cfg.n;
            gen.n_grid = static_cast<std::size_t>(cfg.n_grid);
            gen.seed = cfg.seed;
            const auto [g1, g2] = gen_supplement(gen);
            csv::write_two_sample_csv(target.stream(), g1, g2);
        } else {
            throw input_error("unknown design '" + cfg.design +
                              "' (expected independent, paired or supplement)");
        }
    });
}

} // namespace funcov::cli
