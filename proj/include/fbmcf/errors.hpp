#pragma once

#include <stdexcept>
#include <string>

namespace fbmcf {

/// Iterative solver ran out of budget before reaching the requested tolerance.
struct no_convergence_error : std::runtime_error {
    explicit no_convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Explicit time step exceeds the stability limit of the stencil.
struct cfl_violation_error : std::runtime_error {
    explicit cfl_violation_error(const std::string& what) : std::runtime_error(what) {}
};

/// A state invariant (monotonicity, compatibility, ...) failed mid-run.
struct invariant_breach_error : std::runtime_error {
    explicit invariant_breach_error(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough trace data to evaluate the requested estimate.
struct insufficient_data_error : std::runtime_error {
    explicit insufficient_data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Input lies outside the regime in which the check is meaningful.
struct regime_violation_error : std::runtime_error {
    explicit regime_violation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fbmcf
