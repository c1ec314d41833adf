#pragma once

// Reference implementations used to cross-check the library: plain
// nested-loop evaluations of the test statistics and a per-segment
// quadrature of the CvM discrepancy integral. Deliberately written
// without the library's kernels (and without Eigen) so they form an
// independent route to the same numbers.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>; // rows = observations

struct MaxEntry {
    double value = 0.0;
    int p = 1; // 1-based, p <= q
    int q = 1;
};

struct Moments {
    std::vector<double> mean;
    Matrix omega;
    Matrix theta;
    Matrix centered;
};

inline Moments moments(const Matrix& scores) {
    const std::size_t n = scores.size();
    const std::size_t k = scores.front().size();
    Moments m;
    m.mean.assign(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) m.mean[p] += scores[i][p];
    for (std::size_t p = 0; p < k; ++p) m.mean[p] /= static_cast<double>(n);

    m.centered.assign(n, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p)
            m.centered[i][p] = scores[i][p] - m.mean[p];

    m.omega.assign(k, std::vector<double>(k, 0.0));
    m.theta.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += m.centered[i][p] * m.centered[i][q];
            m.omega[p][q] = acc / static_cast<double>(n);
            double acc2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = m.centered[i][p] * m.centered[i][q] - m.omega[p][q];
                acc2 += d * d;
            }
            m.theta[p][q] = acc2 / static_cast<double>(n);
        }
    }
    return m;
}

inline double entry_value(double num, double den) {
    if (num < 1e-12 && den < 1e-12) return 0.0;
    if (den < 1e-12) return std::numeric_limits<double>::infinity();
    return num / den;
}

inline MaxEntry statistic_independent(const Matrix& s1, const Matrix& s2) {
    const Moments m1 = moments(s1);
    const Moments m2 = moments(s2);
    const std::size_t k = s1.front().size();
    MaxEntry best;
    double value = -1.0;
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p; q < k; ++q) {
            const double diff = m1.omega[p][q] - m2.omega[p][q];
            const double num = diff * diff;
            const double den = m1.theta[p][q] / static_cast<double>(s1.size()) +
                               m2.theta[p][q] / static_cast<double>(s2.size());
            const double v = entry_value(num, den);
            if (v > value) {
                value = v;
                best.p = static_cast<int>(p + 1);
                best.q = static_cast<int>(q + 1);
            }
        }
    }
    best.value = value < 0.0 ? 0.0 : value;
    return best;
}

inline MaxEntry statistic_paired(const Matrix& s1, const Matrix& s2) {
    const Moments m1 = moments(s1);
    const Moments m2 = moments(s2);
    const std::size_t n = s1.size();
    const std::size_t k = s1.front().size();
    MaxEntry best;
    double value = -1.0;
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p; q < k; ++q) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += (m1.centered[i][p] * m1.centered[i][q]) *
                       (m2.centered[i][p] * m2.centered[i][q]);
            const double phi =
                acc / static_cast<double>(n) - m1.omega[p][q] * m2.omega[p][q];
            const double diff = m1.omega[p][q] - m2.omega[p][q];
            const double num = diff * diff;
            double den = (m1.theta[p][q] + m2.theta[p][q] - 2.0 * phi) /
                         static_cast<double>(n);
            if (den < 0.0) den = 0.0;
            const double v = entry_value(num, den);
            if (v > value) {
                value = v;
                best.p = static_cast<int>(p + 1);
                best.q = static_cast<int>(q + 1);
            }
        }
    }
    best.value = value < 0.0 ? 0.0 : value;
    return best;
}

/// m * integral of (F_m(x) - x)^2 dx, integrating the quadratic exactly
/// on each segment between consecutive order statistics.
inline double cvm_by_quadrature(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t seg = 0; seg <= m; ++seg) {
        const double next = (seg == m) ? 1.0 : values[seg];
        const double f = static_cast<double>(seg) / static_cast<double>(m);
        // integral over [prev, next] of (f - x)^2 dx
        const double a = f - prev;
        const double b = f - next;
        total += (a * a * a - b * b * b) / 3.0;
        prev = next;
    }
    return static_cast<double>(m) * total;
}

} // namespace oracle
