#pragma once

#include <stdexcept>
#include <string>

namespace fracstep {

/// Thrown by mesh constructors on unsorted or repeated time nodes.
class NonMonotoneNodes : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an exponential-sum build cannot reach the requested accuracy.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, double achieved, double requested)
        : std::runtime_error(what), achieved_error(achieved), requested_error(requested) {}
    double achieved_error;
    double requested_error;
};

/// Thrown when a linear solve fails (singular factorization or stalled iteration).
class SolverBreakdown : public std::runtime_error {
public:
    SolverBreakdown(const std::string& what, int iters, double residual, int step = -1)
        : std::runtime_error(what), iterations(iters), final_residual(residual), step_index(step) {}
    int iterations;
    double final_residual;
    int step_index;  // time level, -1 if not stepping
};

/// Thrown by operator assembly when a weight field is non-positive at a sample.
class NonPositiveWeight : public std::runtime_error {
public:
    NonPositiveWeight(const std::string& what, double x, double y, double t, double value)
        : std::runtime_error(what), x(x), y(y), t(t), value(value) {}
    double x, y, t, value;
};

/// Thrown when a required analytic partial is absent and the finite-difference
/// fallback has been disabled.
class MissingPartial : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fracstep
