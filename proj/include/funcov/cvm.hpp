#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "funcov/errors.hpp"

namespace funcov {

/// Cramer-von Mises statistic of a sample against Uniform(0,1), in the
/// m-scaled form T = 1/(12m) + sum_i (u_(i) - (2i-1)/(2m))^2. This equals
/// m times the integral of (F_m(x) - x)^2 over [0, 1].
inline double cvm_statistic(const std::vector<double>& values) {
    const std::size_t m = values.size();
    if (m == 0) throw input_error("CvM statistic needs at least one value");
    for (double u : values)
        if (!(u >= 0.0 && u <= 1.0))
            throw input_error("CvM values must lie in [0, 1]");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    double total = 1.0 / (12.0 * static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const double target = (2.0 * static_cast<double>(i + 1) - 1.0) /
                              (2.0 * static_cast<double>(m));
        const double d = sorted[i] - target;
        total += d * d;
    }
    return total;
}

/// Unscaled discrepancy integral of (F_m(x) - x)^2 dx, i.e. T / m.
inline double cvm_integral(const std::vector<double>& values) {
    return cvm_statistic(values) / static_cast<double>(values.size());
}

} // namespace funcov
