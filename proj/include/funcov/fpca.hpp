#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "funcov/errors.hpp"
#include "funcov/grid.hpp"
#include "funcov/sample.hpp"

// Functional PCA on a dense uniform grid: pointwise demeaning, sample
// covariance surface, eigendecomposition into grid-orthonormal
// eigenfunctions, PVE truncation and score projection.

namespace funcov {

struct GroupMean {
    int group; // 0 when demeaning was not split by group
    MeanCurve mean;
};

struct DemeanResult {
    FunctionalSample sample;
    std::vector<GroupMean> means;
};

/// Full eigendecomposition of a covariance surface. Rows of `functions`
/// are eigenfunctions, orthonormal under the grid inner product; `values`
/// are the matching non-increasing eigenvalues (already dt-scaled, so
/// their sum approximates the integral of the surface diagonal).
struct EigenBasis {
    Eigen::MatrixXd functions; // n x T
    Eigen::VectorXd values;    // length n
};

struct PooledFpca {
    Eigen::MatrixXd eigenfunctions; // K x T
    Eigen::VectorXd eigenvalues;    // length K
    Eigen::MatrixXd scores_g1;      // I1 x K
    Eigen::MatrixXd scores_g2;      // I2 x K
    double pve_achieved = 0.0;
    int k = 0;
};

/// Subtract pointwise means, either of the whole sample or per group.
inline DemeanResult demean_pointwise(const FunctionalSample& sample, bool by_group) {
    sample.check_labels();
    if (sample.n_curves() == 0) throw input_error("group has no curves");

    DemeanResult out{sample, {}};
    if (!by_group) {
        Eigen::VectorXd mean = sample.values.colwise().mean();
        out.sample.values.rowwise() -= mean.transpose();
        out.means.push_back({0, MeanCurve{std::move(mean), sample.grid}});
        return out;
    }

    if (!sample.has_groups())
        throw input_error("demeaning by group requires group labels");
    for (int g : {1, 2}) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index i = 0; i < sample.n_curves(); ++i)
            if (sample.group[static_cast<std::size_t>(i)] == g) rows.push_back(i);
        if (rows.empty()) throw input_error("group has no curves");

        Eigen::VectorXd mean = Eigen::VectorXd::Zero(sample.n_points());
        for (Eigen::Index i : rows) mean += sample.values.row(i).transpose();
        mean /= static_cast<double>(rows.size());
        for (Eigen::Index i : rows)
            out.sample.values.row(i) -= mean.transpose();
        out.means.push_back({g, MeanCurve{std::move(mean), sample.grid}});
    }
    return out;
}

/// Sample covariance surface C(s,t) = (1/I) sum_i Y_i(s) Y_i(t) of an
/// already demeaned sample. Group labels are ignored (pooled estimate).
inline Eigen::MatrixXd covariance_surface(const FunctionalSample& sample) {
    const Eigen::Index i = sample.n_curves();
    if (i < 2) throw input_error("covariance surface needs at least 2 curves");
    const Eigen::Index t = sample.n_points();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(t, t);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(sample.values.transpose(),
                                                   1.0 / static_cast<double>(i));
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov;
}

namespace detail {

// Make the largest-magnitude entry of each row positive (ties resolved
// by the earliest index) so decompositions are reproducible.
inline void fix_signs(Eigen::MatrixXd& functions) {
    for (Eigen::Index k = 0; k < functions.rows(); ++k) {
        Eigen::Index arg = 0;
        double best = std::abs(functions(k, 0));
        for (Eigen::Index j = 1; j < functions.cols(); ++j) {
            const double a = std::abs(functions(k, j));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (functions(k, arg) < 0.0) functions.row(k) = -functions.row(k);
    }
}

// Sort descending, scale by dt, clamp small negatives; reject
// eigenvalues below -1e-8 * lambda_1.
inline Eigen::VectorXd finalize_eigenvalues(Eigen::VectorXd raw_ascending, double dt) {
    Eigen::VectorXd values = raw_ascending.reverse() * dt;
    const double lam1 = std::max(values.size() > 0 ? values[0] : 0.0, 0.0);
    const double floor = -1e-8 * lam1;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (values[k] < floor)
            throw numeric_error("covariance surface has a negative eigenvalue beyond tolerance");
        if (values[k] < 0.0) values[k] = 0.0;
    }
    return values;
}

} // namespace detail

/// Eigendecompose a symmetric PSD covariance surface. Discrete
/// eigenvectors are rescaled by 1/sqrt(dt) so the returned functions are
/// orthonormal under <f,g> = sum_j f_j g_j dt, and eigenvalues carry the
/// dt factor so their sum matches dt * trace.
inline EigenBasis eigendecompose(const Eigen::MatrixXd& cov, const Grid& grid) {
    const Eigen::Index t = cov.rows();
    if (cov.cols() != t || static_cast<std::size_t>(t) != grid.size())
        throw input_error("covariance surface does not match grid");
    const double scale = cov.cwiseAbs().maxCoeff();
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * scale)
        throw input_error("covariance surface is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigendecomposition failed to converge");

    EigenBasis basis;
    basis.values = detail::finalize_eigenvalues(solver.eigenvalues(), grid.dt());
    basis.functions = solver.eigenvectors().rowwise().reverse().transpose() /
                      std::sqrt(grid.dt());
    detail::fix_signs(basis.functions);
    return basis;
}

/// Smallest K whose leading eigenvalues explain at least `pve` of the
/// total variance.
inline int select_k_by_pve(const Eigen::VectorXd& eigenvalues, double pve) {
    if (!(pve > 0.0 && pve < 1.0)) throw input_error("pve must lie in (0, 1)");
    if (eigenvalues.size() == 0) throw input_error("no eigenvalues given");
    double total = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        if (eigenvalues[k] < 0.0)
            throw input_error("eigenvalues must be non-negative");
        if (k > 0 && eigenvalues[k] > eigenvalues[k - 1] * (1.0 + 1e-12) + 1e-300)
            throw input_error("eigenvalues must be non-increasing");
        total += eigenvalues[k];
    }
    if (total <= 0.0) throw input_error("eigenvalues are all zero");
    double cum = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        cum += eigenvalues[k];
        if (cum / total >= pve) return static_cast<int>(k + 1);
    }
    return static_cast<int>(eigenvalues.size());
}

/// Scores zeta_ik = sum_j Y_i(t_j) phi_k(t_j) dt for demeaned curves.
inline Eigen::MatrixXd project_scores(const FunctionalSample& demeaned,
                                      const Eigen::MatrixXd& eigenfunctions,
                                      const Grid& grid) {
    if (!demeaned.grid.same_as(grid) ||
        static_cast<std::size_t>(eigenfunctions.cols()) != grid.size())
        throw input_error("grid mismatch between curves and eigenfunctions");
    return (demeaned.values * eigenfunctions.transpose()) * grid.dt();
}

namespace detail {

// Eigendecomposition through the curve Gram matrix: when there are fewer
// curves than grid points the covariance surface has rank at most I, and
// the I x I Gram matrix yields the same nonzero spectrum at a fraction of
// the cost. Eigenvalues are padded with explicit zeros up to I.
inline EigenBasis eigendecompose_gram(const Eigen::MatrixXd& demeaned_values,
                                      const Grid& grid, double pve, int& k_out) {
    const Eigen::Index i = demeaned_values.rows();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(i, i);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(demeaned_values,
                                                    1.0 / static_cast<double>(i));
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigendecomposition failed to converge");

    EigenBasis basis;
    basis.values = detail::finalize_eigenvalues(solver.eigenvalues(), grid.dt());
    k_out = select_k_by_pve(basis.values, pve);

    basis.functions.resize(k_out, demeaned_values.cols());
    const double inv_sqrt_dt = 1.0 / std::sqrt(grid.dt());
    for (int k = 0; k < k_out; ++k) {
        const Eigen::VectorXd u = solver.eigenvectors().col(i - 1 - k);
        const double matrix_eval = basis.values[k] / grid.dt();
        basis.functions.row(k) = (demeaned_values.transpose() * u).transpose() /
                                 std::sqrt(static_cast<double>(i) * matrix_eval) *
                                 inv_sqrt_dt;
    }
    detail::fix_signs(basis.functions);
    return basis;
}

} // namespace detail

/// Pooled FPCA of a single sample carrying group labels: demean per
/// group, decompose the pooled covariance, truncate by PVE and project
/// per-group scores onto the shared basis.
inline PooledFpca pooled_fpca_labeled(const FunctionalSample& pooled, double pve) {
    pooled.check_labels();
    if (!pooled.has_groups())
        throw input_error("pooled FPCA requires group labels");
    Eigen::Index i1 = 0, i2 = 0;
    for (int g : pooled.group) (g == 1 ? i1 : i2)++;
    if (i1 < 2 || i2 < 2)
        throw input_error("each group needs at least 2 curves");

    const DemeanResult dm = demean_pointwise(pooled, true);
    const Grid& grid = pooled.grid;
    const Eigen::Index t = static_cast<Eigen::Index>(grid.size());

    PooledFpca out;
    int k = 0;
    EigenBasis basis;
    if (dm.sample.n_curves() >= t) {
        basis = eigendecompose(covariance_surface(dm.sample), grid);
        k = select_k_by_pve(basis.values, pve);
        basis.functions.conservativeResize(k, Eigen::NoChange);
    } else {
        basis = detail::eigendecompose_gram(dm.sample.values, grid, pve, k);
    }

    double total = basis.values.sum();
    out.k = k;
    out.pve_achieved = basis.values.head(k).sum() / total;
    out.eigenvalues = basis.values.head(k);
    out.eigenfunctions = std::move(basis.functions);

    const Eigen::MatrixXd scores =
        (dm.sample.values * out.eigenfunctions.transpose()) * grid.dt();
    out.scores_g1.resize(i1, k);
    out.scores_g2.resize(i2, k);
    Eigen::Index r1 = 0, r2 = 0;
    for (Eigen::Index i = 0; i < dm.sample.n_curves(); ++i) {
        if (pooled.group[static_cast<std::size_t>(i)] == 1)
            out.scores_g1.row(r1++) = scores.row(i);
        else
            out.scores_g2.row(r2++) = scores.row(i);
    }
    return out;
}

/// Pooled FPCA of two separate samples observed on a shared grid.
inline PooledFpca pooled_fpca(const FunctionalSample& group1,
                              const FunctionalSample& group2, double pve) {
    if (!group1.grid.same_as(group2.grid))
        throw input_error("samples must share a grid");
    const Eigen::Index i1 = group1.n_curves(), i2 = group2.n_curves();
    FunctionalSample pooled(Eigen::MatrixXd(i1 + i2, group1.n_points()), group1.grid);
    pooled.values.topRows(i1) = group1.values;
    pooled.values.bottomRows(i2) = group2.values;
    pooled.group.assign(static_cast<std::size_t>(i1), 1);
    pooled.group.insert(pooled.group.end(), static_cast<std::size_t>(i2), 2);
    return pooled_fpca_labeled(pooled, pve);
}

} // namespace funcov
