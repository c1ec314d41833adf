#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "funcov/errors.hpp"
#include "funcov/grid.hpp"
#include "funcov/rng.hpp"
#include "funcov/sample.hpp"

// Seedable synthetic-data generators used for size/power studies and as
// test fixtures: three-component sine model for independent groups, a
// correlated-score paired variant, and two-component sine/cosine/
// polynomial models for basis-mismatch scenarios.

namespace funcov {

/// sin(2 pi k t) scaled to unit L2 norm on [0, 1].
inline Eigen::VectorXd basis_sine(int k, const Grid& grid) {
    if (k < 1) throw input_error("basis index must be >= 1");
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j)
        out[static_cast<Eigen::Index>(j)] =
            std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * k * grid[j]);
    return out;
}

/// cos(2 pi k t) scaled to unit L2 norm on [0, 1].
inline Eigen::VectorXd basis_cosine(int k, const Grid& grid) {
    if (k < 1) throw input_error("basis index must be >= 1");
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j)
        out[static_cast<Eigen::Index>(j)] =
            std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * k * grid[j]);
    return out;
}

/// Centered monomials t, t^2, ..., t^degree orthonormalised under the
/// grid inner product (constant excluded). Rows are the polynomials.
inline Eigen::MatrixXd basis_orthopoly(int degree, const Grid& grid) {
    if (degree < 1) throw input_error("polynomial degree must be >= 1");
    if (static_cast<std::size_t>(degree) >= grid.size())
        throw input_error("polynomial degree must be below the grid size");
    const Eigen::Index t = static_cast<Eigen::Index>(grid.size());
    const double dt = grid.dt();
    Eigen::MatrixXd out(degree, t);
    const double t_total = static_cast<double>(grid.size()) * dt;
    for (int d = 1; d <= degree; ++d) {
        Eigen::VectorXd v(t);
        for (Eigen::Index j = 0; j < t; ++j)
            v[j] = std::pow(grid[static_cast<std::size_t>(j)], d);
        v.array() -= v.sum() * dt / t_total; // orthogonal to the constant
        for (int prev = 0; prev + 1 < d; ++prev) {
            const double proj = (v.transpose() * out.row(prev).transpose()).value() * dt;
            v -= proj * out.row(prev).transpose();
        }
        const double norm = std::sqrt(v.squaredNorm() * dt);
        if (!(norm > 0.0)) throw numeric_error("polynomial basis is degenerate");
        out.row(d - 1) = v.transpose() / norm;
    }
    return out;
}

struct IndependentSimConfig {
    double gamma = 0.0; // shared third eigenvalue
    double delta = 0.0; // effect size added to group 2's third eigenvalue
    Eigen::Index n_per_group = 100;
    std::size_t n_grid = 200;
    double noise_var = 0.25;
    std::uint64_t seed = 1;
};

struct PairedSimConfig {
    double rho = 0.0; // within-pair score correlation, shared across components
    double delta = 0.0;
    Eigen::Index n_pairs = 100;
    std::size_t n_grid = 200;
    double noise_var = 0.25;
    std::uint64_t seed = 1;
    // the shared third eigenvalue is fixed at 0.5 for this design
};

enum class SupplementScenario {
    null_same,      // both groups from the sine model
    orthogonal,     // sine vs cosine
    non_orthogonal, // sine vs orthonormal polynomials
};

struct SupplementSimConfig {
    SupplementScenario scenario = SupplementScenario::null_same;
    double noise_var = 0.25;
    Eigen::Index n_per_group = 100;
    std::size_t n_grid = 200;
    std::uint64_t seed = 1;
};

namespace detail {

inline void fill_normals(rng::Engine& eng, double* out, std::size_t count) {
    std::size_t i = 0;
    while (i + 1 < count) {
        const auto [a, b] = rng::normal_pair(eng);
        out[i++] = a;
        out[i++] = b;
    }
    if (i < count) out[i] = rng::normal(eng);
}

// One curve: sum_k s_k * sqrt(lambda_k) * basis_k + sqrt(noise_var) * eps.
template <typename RowExpr>
void assemble_curve(RowExpr row, const Eigen::MatrixXd& basis_rows,
                    const std::vector<double>& lambdas, const double* scores,
                    const double* noise, double noise_sd) {
    row.setZero();
    for (std::size_t k = 0; k < lambdas.size(); ++k)
        row += scores[k] * std::sqrt(lambdas[k]) * basis_rows.row(static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < row.cols(); ++j)
        row[j] += noise_sd * noise[static_cast<std::size_t>(j)];
}

inline FunctionalSample gen_group(const Grid& grid, const Eigen::MatrixXd& basis_rows,
                                  const std::vector<double>& lambdas,
                                  Eigen::Index n_curves, double noise_var,
                                  std::uint64_t seed, std::uint64_t tag,
                                  std::uint64_t group_index) {
    const std::size_t t = grid.size();
    const std::size_t n_scores = lambdas.size();
    FunctionalSample sample(Eigen::MatrixXd(n_curves, static_cast<Eigen::Index>(t)), grid);
    const double noise_sd = std::sqrt(noise_var);
    std::vector<double> draws(n_scores + t);
    for (Eigen::Index i = 0; i < n_curves; ++i) {
        auto eng = rng::engine(seed, {tag, group_index, static_cast<std::uint64_t>(i)});
        fill_normals(eng, draws.data(), draws.size());
        assemble_curve(sample.values.row(i), basis_rows, lambdas, draws.data(),
                       draws.data() + n_scores, noise_sd);
    }
    return sample;
}

} // namespace detail

/// Two independent groups from the three-component sine model. Scores
/// are zero-mean Gaussians with variances (16, 9, gamma) in group 1 and
/// (16, 9, gamma + delta) in group 2; iid Gaussian noise per grid point.
inline std::pair<FunctionalSample, FunctionalSample>
gen_independent(const IndependentSimConfig& cfg) {
    if (cfg.gamma < 0.0 || cfg.delta < 0.0 || cfg.noise_var < 0.0)
        throw input_error("variances must be non-negative");
    if (cfg.n_per_group < 1) throw input_error("need at least one curve per group");
    const Grid grid = Grid::regular(cfg.n_grid);
    Eigen::MatrixXd basis(3, static_cast<Eigen::Index>(grid.size()));
    for (int k = 1; k <= 3; ++k) basis.row(k - 1) = basis_sine(k, grid).transpose();

    auto g1 = detail::gen_group(grid, basis, {16.0, 9.0, cfg.gamma}, cfg.n_per_group,
                                cfg.noise_var, cfg.seed, rng::stream::gen_independent, 1);
    auto g2 = detail::gen_group(grid, basis, {16.0, 9.0, cfg.gamma + cfg.delta},
                                cfg.n_per_group, cfg.noise_var, cfg.seed,
                                rng::stream::gen_independent, 2);
    return {std::move(g1), std::move(g2)};
}

/// Paired samples: per component the pair's scores are jointly Gaussian
/// with correlation rho and variances (lambda_k, lambda_k + delta for
/// k = 3). Rows are aligned pairs and carry matching pair ids.
inline std::pair<FunctionalSample, FunctionalSample>
gen_paired(const PairedSimConfig& cfg) {
    if (!(std::abs(cfg.rho) < 1.0))
        throw input_error("pair correlation must satisfy |rho| < 1");
    if (cfg.delta < 0.0 || cfg.noise_var < 0.0)
        throw input_error("variances must be non-negative");
    if (cfg.n_pairs < 2) throw input_error("need at least two pairs");
    const Grid grid = Grid::regular(cfg.n_grid);
    Eigen::MatrixXd basis(3, static_cast<Eigen::Index>(grid.size()));
    for (int k = 1; k <= 3; ++k) basis.row(k - 1) = basis_sine(k, grid).transpose();

    const std::vector<double> lam1{16.0, 9.0, 0.5};
    const std::vector<double> lam2{16.0, 9.0, 0.5 + cfg.delta};
    const double cross = std::sqrt(1.0 - cfg.rho * cfg.rho);
    const std::size_t t = grid.size();
    const double noise_sd = std::sqrt(cfg.noise_var);

    FunctionalSample g1(Eigen::MatrixXd(cfg.n_pairs, static_cast<Eigen::Index>(t)), grid);
    FunctionalSample g2(Eigen::MatrixXd(cfg.n_pairs, static_cast<Eigen::Index>(t)), grid);
    std::vector<double> noise(2 * t);
    double s1[3], s2[3];
    for (Eigen::Index i = 0; i < cfg.n_pairs; ++i) {
        auto eng = rng::engine(cfg.seed, {rng::stream::gen_paired,
                                          static_cast<std::uint64_t>(i)});
        for (int k = 0; k < 3; ++k) {
            const auto [z1, z2] = rng::normal_pair(eng);
            s1[k] = z1;
            s2[k] = cfg.rho * z1 + cross * z2;
        }
        detail::fill_normals(eng, noise.data(), noise.size());
        detail::assemble_curve(g1.values.row(i), basis, lam1, s1, noise.data(), noise_sd);
        detail::assemble_curve(g2.values.row(i), basis, lam2, s2, noise.data() + t,
                               noise_sd);
        g1.pair.push_back(std::to_string(i));
        g2.pair.push_back(std::to_string(i));
    }
    return {std::move(g1), std::move(g2)};
}

/// Basis-mismatch scenarios: group 1 always follows the two-component
/// sine model with score variances (4, 1); group 2 follows the sine,
/// cosine, or orthonormal-polynomial model depending on the scenario.
inline std::pair<FunctionalSample, FunctionalSample>
gen_supplement(const SupplementSimConfig& cfg) {
    if (cfg.noise_var < 0.0) throw input_error("variances must be non-negative");
    if (cfg.n_per_group < 1) throw input_error("need at least one curve per group");
    const Grid grid = Grid::regular(cfg.n_grid);

    Eigen::MatrixXd sine(2, static_cast<Eigen::Index>(grid.size()));
    sine.row(0) = basis_sine(1, grid).transpose();
    sine.row(1) = basis_sine(2, grid).transpose();

    Eigen::MatrixXd other;
    switch (cfg.scenario) {
    case SupplementScenario::null_same:
        other = sine;
        break;
    case SupplementScenario::orthogonal:
        other.resize(2, static_cast<Eigen::Index>(grid.size()));
        other.row(0) = basis_cosine(1, grid).transpose();
        other.row(1) = basis_cosine(2, grid).transpose();
        break;
    case SupplementScenario::non_orthogonal:
        other = basis_orthopoly(2, grid);
        break;
    }

    const std::vector<double> lambdas{4.0, 1.0};
    auto g1 = detail::gen_group(grid, sine, lambdas, cfg.n_per_group, cfg.noise_var,
                                cfg.seed, rng::stream::gen_supplement, 1);
    auto g2 = detail::gen_group(grid, other, lambdas, cfg.n_per_group, cfg.noise_var,
                                cfg.seed, rng::stream::gen_supplement, 2);
    return {std::move(g1), std::move(g2)};
}

} // namespace funcov
