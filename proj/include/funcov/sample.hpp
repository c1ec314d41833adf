#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funcov/errors.hpp"
#include "funcov/grid.hpp"

namespace funcov {

/// A set of curves observed on a shared uniform grid. Rows of `values`
/// are curves. `group` (1 or 2) and `pair` labels are optional and may
/// be empty; when present they have one entry per row.
struct FunctionalSample {
    Eigen::MatrixXd values; // curves x timepoints
    Grid grid;
    std::vector<int> group;
    std::vector<std::string> pair;

    FunctionalSample(Eigen::MatrixXd values_, Grid grid_)
        : values(std::move(values_)), grid(std::move(grid_)) {
        if (static_cast<std::size_t>(values.cols()) != grid.size())
            throw input_error("curve length does not match grid size");
    }

    Eigen::Index n_curves() const { return values.rows(); }
    Eigen::Index n_points() const { return values.cols(); }

    bool has_groups() const { return !group.empty(); }
    bool has_pairs() const { return !pair.empty(); }

    void check_labels() const {
        if (!group.empty() && group.size() != static_cast<std::size_t>(values.rows()))
            throw input_error("group labels do not match number of curves");
        if (!pair.empty() && pair.size() != static_cast<std::size_t>(values.rows()))
            throw input_error("pair labels do not match number of curves");
        for (int g : group)
            if (g != 1 && g != 2) throw input_error("group labels must be 1 or 2");
    }
};

/// Pointwise mean of one group of curves.
struct MeanCurve {
    Eigen::VectorXd values;
    Grid grid;
};

} // namespace funcov
