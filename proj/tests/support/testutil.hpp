#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funcov/global_test.hpp"
#include "funcov/grid.hpp"
#include "funcov/rng.hpp"
#include "funcov/sample.hpp"
#include "funcov/simulate.hpp"

namespace testutil {

inline Eigen::MatrixXd random_scores(std::size_t n, std::size_t k, std::uint64_t seed) {
    funcov::rng::Engine eng(funcov::rng::derive(seed, {0xabc}));
    Eigen::MatrixXd m(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                funcov::rng::normal(eng);
    return m;
}

inline std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
    return rows;
}

inline funcov::FunctionalSample sample_from_rows(
    const std::vector<Eigen::VectorXd>& rows, const funcov::Grid& grid) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return funcov::FunctionalSample(std::move(m), grid);
}

inline double grid_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const funcov::Grid& grid) {
    return a.dot(b) * grid.dt();
}

/// Trials drawn from one shared mechanism with a compound-symmetric
/// neuron effect: the k-th standardised score of neuron r in any trial is
/// sqrt(rho) * eta_rk + sqrt(1 - rho) * eps, so any two trials of the
/// same neuron correlate at rho while trials stay exchangeable within
/// each neuron. Score variances are (16, 9, lambda3[trial]); curves live
/// on the three-sine basis plus iid observation noise.
inline funcov::TrialDataset make_trial_dataset(std::size_t n_trials,
                                               std::size_t n_neurons, std::size_t t,
                                               const std::vector<double>& lambda3,
                                               double noise_var, std::uint64_t seed,
                                               double rho = 0.5) {
    const funcov::Grid grid = funcov::Grid::regular(t);
    Eigen::MatrixXd basis(3, static_cast<Eigen::Index>(t));
    for (int k = 1; k <= 3; ++k)
        basis.row(k - 1) = funcov::basis_sine(k, grid).transpose();

    std::vector<std::string> trial_ids, neuron_ids;
    for (std::size_t i = 0; i < n_trials; ++i) trial_ids.push_back(std::to_string(i));
    for (std::size_t r = 0; r < n_neurons; ++r) neuron_ids.push_back("n" + std::to_string(r));

    Eigen::MatrixXd neuron_effect(static_cast<Eigen::Index>(n_neurons), 3);
    for (std::size_t r = 0; r < n_neurons; ++r) {
        auto eng = funcov::rng::engine(seed, {0x7711, r});
        for (int k = 0; k < 3; ++k)
            neuron_effect(static_cast<Eigen::Index>(r), k) = funcov::rng::normal(eng);
    }

    const double shared = std::sqrt(rho);
    const double fresh = std::sqrt(1.0 - rho);
    const double noise_sd = std::sqrt(noise_var);
    std::vector<Eigen::MatrixXd> curves(n_trials);
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        const double lam3 = lambda3.empty() ? 0.5 : lambda3[trial % lambda3.size()];
        const double sds[3] = {4.0, 3.0, std::sqrt(lam3)};
        curves[trial].resize(static_cast<Eigen::Index>(n_neurons),
                             static_cast<Eigen::Index>(t));
        for (std::size_t r = 0; r < n_neurons; ++r) {
            auto eng = funcov::rng::engine(seed, {0x7712, trial, r});
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(t));
            for (int k = 0; k < 3; ++k) {
                const double z = shared * neuron_effect(static_cast<Eigen::Index>(r), k) +
                                 fresh * funcov::rng::normal(eng);
                row += sds[k] * z * basis.row(k);
            }
            for (Eigen::Index j = 0; j < row.cols(); ++j)
                row[j] += noise_sd * funcov::rng::normal(eng);
            curves[trial].row(static_cast<Eigen::Index>(r)) = row;
        }
    }
    return funcov::TrialDataset(std::move(trial_ids), std::move(neuron_ids),
                                std::move(curves), grid);
}

/// Two-sided Kolmogorov-Smirnov distance between a sample and U(0,1).
inline double ks_uniform(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - values[i];
        const double lo = values[i] - static_cast<double>(i) / n;
        dist = std::max(dist, std::max(hi, lo));
    }
    return dist;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double dist = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        const double fa = static_cast<double>(ia) / static_cast<double>(a.size());
        const double fb = static_cast<double>(ib) / static_cast<double>(b.size());
        dist = std::max(dist, std::abs(fa - fb));
    }
    return dist;
}

} // namespace testutil
