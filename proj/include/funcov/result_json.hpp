#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "funcov/global_test.hpp"
#include "funcov/test_result.hpp"

namespace funcov {

/// JSON has no infinity; degenerate statistics are emitted as "inf".
inline nlohmann::json json_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return value;
}

inline nlohmann::json to_json(const TestResult& r) {
    nlohmann::json j;
    j["statistic"] = json_number(r.statistic);
    j["k"] = r.k;
    j["argmax"] = {r.argmax_p, r.argmax_q};
    j["p_asymptotic"] = r.p_asymptotic ? nlohmann::json(*r.p_asymptotic)
                                       : nlohmann::json(nullptr);
    j["p_permutation"] = r.p_permutation ? nlohmann::json(*r.p_permutation)
                                         : nlohmann::json(nullptr);
    j["n1"] = r.n1;
    j["n2"] = r.n2;
    j["permutations"] = r.permutations;
    j["seed"] = r.seed;
    j["pve_achieved"] = r.pve_achieved;
    return j;
}

inline std::vector<std::size_t> pvalue_histogram(const std::vector<double>& pvalues,
                                                 std::size_t bins = 20) {
    std::vector<std::size_t> counts(bins, 0);
    for (double p : pvalues) {
        std::size_t b = static_cast<std::size_t>(p * static_cast<double>(bins));
        if (b >= bins) b = bins - 1; // p == 1 falls in the last bin
        ++counts[b];
    }
    return counts;
}

inline double empirical_quantile(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(level * static_cast<double>(values.size()));
    const std::size_t idx = std::min(
        values.size() - 1, static_cast<std::size_t>(std::max(rank - 1.0, 0.0)));
    return values[idx];
}

inline nlohmann::json to_json(const GlobalResult& r) {
    nlohmann::json j;
    j["n_trials"] = r.n_trials;
    j["n_neurons"] = r.n_neurons;
    j["pairwise_pvalues"] = r.pairwise_pvalues;
    j["pvalue_histogram"] = {{"bins", 20},
                             {"counts", pvalue_histogram(r.pairwise_pvalues)}};
    j["eta_observed"] = r.eta_observed;
    j["eta_raw"] = r.eta_raw;
    j["eta_null"] = r.eta_null;
    j["eta_null_summary"] = {
        {"min", *std::min_element(r.eta_null.begin(), r.eta_null.end())},
        {"max", *std::max_element(r.eta_null.begin(), r.eta_null.end())},
        {"q95", empirical_quantile(r.eta_null, 0.95)}};
    j["p_global"] = r.p_global;
    j["null_q_alpha"] = r.null_q_alpha;
    j["reject_at_alpha"] = r.reject_at_alpha;
    j["config"] = {{"pve", r.config.pve},
                   {"per_pair_permutations", r.config.per_pair_permutations},
                   {"global_permutations", r.config.global_permutations},
                   {"seed", r.config.seed},
                   {"alpha", r.config.alpha},
                   {"asymptotic_pairwise", r.config.asymptotic_pairwise}};
    return j;
}

} // namespace funcov
