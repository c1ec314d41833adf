#pragma once

#include <stdexcept>
#include <string>

namespace funcov {

/// Malformed or contract-violating input (bad CSV, mismatched shapes, ...).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (non-PSD covariance, degenerate decomposition, ...).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace funcov
