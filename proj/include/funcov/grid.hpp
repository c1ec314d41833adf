#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "funcov/errors.hpp"

namespace funcov {

/// Uniformly spaced observation grid. Integrals over the grid use the
/// left Riemann rule: <f, g> = sum_j f_j g_j dt.
class Grid {
public:
    explicit Grid(std::vector<double> points) : points_(std::move(points)) {
        if (points_.size() < 2) throw input_error("grid needs at least 2 points");
        const std::size_t t = points_.size();
        dt_ = (points_.back() - points_.front()) / static_cast<double>(t - 1);
        if (!(dt_ > 0.0)) throw input_error("grid points must be strictly increasing");
        for (std::size_t j = 0; j + 1 < t; ++j) {
            const double gap = points_[j + 1] - points_[j];
            if (!(gap > 0.0)) throw input_error("grid points must be strictly increasing");
            if (std::abs(gap - dt_) > 1e-12 * dt_)
                throw input_error("grid must be uniform");
        }
    }

    /// t points equally spaced on [0, 1].
    static Grid regular(std::size_t t) {
        if (t < 2) throw input_error("grid needs at least 2 points");
        std::vector<double> pts(t);
        for (std::size_t j = 0; j < t; ++j)
            pts[j] = static_cast<double>(j) / static_cast<double>(t - 1);
        return Grid(std::move(pts));
    }

    std::size_t size() const { return points_.size(); }
    double dt() const { return dt_; }
    double operator[](std::size_t j) const { return points_[j]; }
    const std::vector<double>& points() const { return points_; }

    bool same_as(const Grid& other) const {
        if (points_.size() != other.points_.size()) return false;
        const double tol = 1e-12 * (points_.back() - points_.front());
        for (std::size_t j = 0; j < points_.size(); ++j)
            if (std::abs(points_[j] - other.points_[j]) > tol) return false;
        return true;
    }

private:
    std::vector<double> points_;
    double dt_ = 0.0;
};

} // namespace funcov
