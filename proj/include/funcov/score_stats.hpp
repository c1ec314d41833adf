#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "funcov/errors.hpp"

// Sample moments of FPC score matrices and the max-standardised-difference
// statistic over score covariance entries.
//
// The moment kernels accumulate each entry's sum over curves sequentially
// with a single accumulator (vectorisation happens across entries only),
// so results are bit-identical to a plain nested-loop evaluation of the
// same formulas.

namespace funcov {

/// Per-group score moments: omega is the sample covariance of the score
/// vectors (1/n divisor), theta the per-entry variance of the centered
/// score products used to standardise covariance differences.
struct ScoreCovariance {
    Eigen::MatrixXd omega; // K x K, symmetric
    Eigen::MatrixXd theta; // K x K, symmetric, entrywise >= 0
    Eigen::VectorXd mean;  // column means
    Eigen::Index n = 0;
};

/// Value and 1-based argmax (p <= q) of a max-type entry scan.
struct MaxStat {
    double value = 0.0;
    int p = 1;
    int q = 1;
};

namespace detail {

inline constexpr double kDegenerateEps = 1e-12;

// mean_k = (sum_i s(i,k)) / n, centered(i,k) = s(i,k) - mean_k.
// Buffers are row-major n x k.
inline void center_scores(const double* scores, std::size_t n, std::size_t k,
                          double* mean, double* centered) {
    for (std::size_t p = 0; p < k; ++p) mean[p] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = scores + i * k;
        for (std::size_t p = 0; p < k; ++p) mean[p] += row[p];
    }
    for (std::size_t p = 0; p < k; ++p) mean[p] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = scores + i * k;
        double* out = centered + i * k;
        for (std::size_t p = 0; p < k; ++p) out[p] = row[p] - mean[p];
    }
}

// omega(p,q) = (sum_i c(i,p) c(i,q)) / n for p <= q; upper triangle of a
// row-major k x k buffer, other entries untouched.
inline void omega_upper(const double* centered, std::size_t n, std::size_t k,
                        double* omega) {
    for (std::size_t p = 0; p < k; ++p) {
        double* out = omega + p * k;
        for (std::size_t q = p; q < k; ++q) out[q] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = centered + i * k;
            const double cp = row[p];
            for (std::size_t q = p; q < k; ++q) out[q] += cp * row[q];
        }
        for (std::size_t q = p; q < k; ++q) out[q] /= static_cast<double>(n);
    }
}

// theta(p,q) = (sum_i (c(i,p) c(i,q) - omega(p,q))^2) / n, upper triangle.
inline void theta_upper(const double* centered, std::size_t n, std::size_t k,
                        const double* omega, double* theta) {
    for (std::size_t p = 0; p < k; ++p) {
        const double* om = omega + p * k;
        double* out = theta + p * k;
        for (std::size_t q = p; q < k; ++q) out[q] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = centered + i * k;
            const double cp = row[p];
            for (std::size_t q = p; q < k; ++q) {
                const double d = cp * row[q] - om[q];
                out[q] += d * d;
            }
        }
        for (std::size_t q = p; q < k; ++q) out[q] /= static_cast<double>(n);
    }
}

// phi(p,q) = (sum_i a(i,p) a(i,q) b(i,p) b(i,q)) / n - omega1(p,q) omega2(p,q),
// the covariance between the two groups' centered score products.
inline void phi_upper(const double* centered1, const double* centered2,
                      std::size_t n, std::size_t k, const double* omega1,
                      const double* omega2, double* phi) {
    for (std::size_t p = 0; p < k; ++p) {
        double* out = phi + p * k;
        for (std::size_t q = p; q < k; ++q) out[q] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* a = centered1 + i * k;
            const double* b = centered2 + i * k;
            const double ap = a[p];
            const double bp = b[p];
            for (std::size_t q = p; q < k; ++q) out[q] += (ap * a[q]) * (bp * b[q]);
        }
        const double* o1 = omega1 + p * k;
        const double* o2 = omega2 + p * k;
        for (std::size_t q = p; q < k; ++q)
            out[q] = out[q] / static_cast<double>(n) - o1[q] * o2[q];
    }
}

// Shared max scan. Entries where numerator and denominator are both
// below kDegenerateEps contribute 0; a vanishing denominator with a
// non-vanishing numerator yields +infinity. Ties keep the
// lexicographically smallest (p, q).
struct MaxScan {
    double best = -1.0;
    std::size_t p = 0, q = 0;

    void feed(std::size_t pp, std::size_t qq, double num, double den) {
        double value;
        if (num < kDegenerateEps && den < kDegenerateEps)
            value = 0.0;
        else if (den < kDegenerateEps)
            value = std::numeric_limits<double>::infinity();
        else
            value = num / den;
        if (value > best) {
            best = value;
            p = pp;
            q = qq;
        }
    }

    MaxStat result() const {
        return {best < 0.0 ? 0.0 : best, static_cast<int>(p + 1),
                static_cast<int>(q + 1)};
    }
};

// Independent-samples scan over precomputed upper-triangle moments.
inline MaxStat max_stat_independent(const double* omega1, const double* theta1,
                                    std::size_t n1, const double* omega2,
                                    const double* theta2, std::size_t n2,
                                    std::size_t k) {
    MaxScan scan;
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p; q < k; ++q) {
            const std::size_t idx = p * k + q;
            const double diff = omega1[idx] - omega2[idx];
            const double num = diff * diff;
            const double den = theta1[idx] / static_cast<double>(n1) +
                               theta2[idx] / static_cast<double>(n2);
            scan.feed(p, q, num, den);
        }
    }
    return scan.result();
}

// Paired scan; the denominator (theta1 + theta2 - 2 phi) / n is clamped
// at zero from below (a variance-of-difference identity guarantees it is
// non-negative up to rounding).
inline MaxStat max_stat_paired(const double* omega1, const double* theta1,
                               const double* omega2, const double* theta2,
                               const double* phi, std::size_t n, std::size_t k) {
    MaxScan scan;
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p; q < k; ++q) {
            const std::size_t idx = p * k + q;
            const double diff = omega1[idx] - omega2[idx];
            const double num = diff * diff;
            double den = (theta1[idx] + theta2[idx] - 2.0 * phi[idx]) /
                         static_cast<double>(n);
            if (den < 0.0) den = 0.0;
            scan.feed(p, q, num, den);
        }
    }
    return scan.result();
}

// Copy an Eigen matrix into a row-major buffer.
inline void to_row_major(const Eigen::MatrixXd& m, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()));
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out.data(), m.rows(), m.cols()) = m;
}

// Mirror an upper-triangle row-major buffer into a symmetric Eigen matrix.
inline Eigen::MatrixXd upper_to_symmetric(const std::vector<double>& buf,
                                          std::size_t k) {
    Eigen::MatrixXd m(k, k);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = p; q < k; ++q) {
            m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = buf[p * k + q];
            m(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = buf[p * k + q];
        }
    return m;
}

// One group's moment buffers with reusable storage.
struct GroupMoments {
    std::vector<double> centered, mean, omega, theta;

    void compute(const double* scores, std::size_t n, std::size_t k) {
        centered.resize(n * k);
        mean.resize(k);
        omega.resize(k * k);
        theta.resize(k * k);
        center_scores(scores, n, k, mean.data(), centered.data());
        omega_upper(centered.data(), n, k, omega.data());
        theta_upper(centered.data(), n, k, omega.data(), theta.data());
    }
};

} // namespace detail

/// Column means, score covariance (1/n divisor) and the per-entry
/// standardisation matrix theta for one group's score matrix.
inline ScoreCovariance score_covariance(const Eigen::MatrixXd& scores) {
    const std::size_t n = static_cast<std::size_t>(scores.rows());
    const std::size_t k = static_cast<std::size_t>(scores.cols());
    if (n < 2) throw input_error("score covariance needs at least 2 rows");
    if (k == 0) throw input_error("score matrix has no columns");

    std::vector<double> rows;
    detail::to_row_major(scores, rows);
    detail::GroupMoments m;
    m.compute(rows.data(), n, k);

    ScoreCovariance out;
    out.n = static_cast<Eigen::Index>(n);
    out.mean = Eigen::Map<Eigen::VectorXd>(m.mean.data(), static_cast<Eigen::Index>(k));
    out.omega = detail::upper_to_symmetric(m.omega, k);
    out.theta = detail::upper_to_symmetric(m.theta, k);
    return out;
}

/// Max over entries p <= q of (omega1 - omega2)^2 / (theta1/n1 + theta2/n2).
inline MaxStat statistic_independent(const ScoreCovariance& c1,
                                     const ScoreCovariance& c2) {
    const std::size_t k = static_cast<std::size_t>(c1.omega.rows());
    if (c2.omega.rows() != c1.omega.rows())
        throw input_error("score covariances have mismatched K");
    detail::MaxScan scan;
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p; q < k; ++q) {
            const Eigen::Index ep = static_cast<Eigen::Index>(p);
            const Eigen::Index eq = static_cast<Eigen::Index>(q);
            const double diff = c1.omega(ep, eq) - c2.omega(ep, eq);
            const double num = diff * diff;
            const double den = c1.theta(ep, eq) / static_cast<double>(c1.n) +
                               c2.theta(ep, eq) / static_cast<double>(c2.n);
            scan.feed(p, q, num, den);
        }
    }
    return scan.result();
}

} // namespace funcov
