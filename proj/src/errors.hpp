#pragma once

#include <stdexcept>
#include <string>

namespace critnls {

/// Invalid input: parameters outside the range an operation is defined on.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Floating-point trouble: quadrature non-convergence, overflow, NaN samples.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver gave up (bracket not found, max iterations, ...).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// The computed structure contradicts a predicted invariant (e.g. wrong
/// fiber critical-point count for the regime). Surfaced, never auto-fixed.
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace critnls
