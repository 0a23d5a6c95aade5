#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bshape {

/// Argument outside the documented domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Curve or mesh would degenerate (bottom too close to the lid, inverted cell, ...).
class GeometryError : public std::runtime_error {
public:
    GeometryError(const std::string& what, double xi)
        : std::runtime_error(what), xi_(xi) {}

    double xi() const noexcept { return xi_; }

private:
    double xi_;
};

/// A fixed-point iteration failed to reach its tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> increments)
        : std::runtime_error(what), increments_(std::move(increments)) {}

    const std::vector<double>& increments() const noexcept { return increments_; }

private:
    std::vector<double> increments_;
};

/// Sparse factorization or solve failed.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (file, flag or key).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bshape
