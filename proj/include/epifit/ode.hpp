#pragma once

#include <functional>
#include <span>
#include <vector>

#include "epifit/errors.hpp"

namespace epifit::ode {

/// Compartment sizes (S, I, R) in population units at one time.
struct StateVector {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;

    double operator[](int k) const { return k == 0 ? s : k == 1 ? i : r; }
    double& operator[](int k) { return k == 0 ? s : k == 1 ? i : r; }
};

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;      // population units
    double initial_step = 1e-2;  // weeks
    double max_step = 10.0;      // weeks
    long max_steps = 200000;

    /// Default tolerances scaled to a population of size n: abs_tol = 1e-10*n.
    static IntegratorConfig for_population(double n);
};

struct Trajectory {
    std::vector<double> times;  // weeks since t0
    std::vector<StateVector> states;

    std::size_t size() const { return times.size(); }
};

using Rhs = std::function<StateVector(double, const StateVector&)>;

/// Adaptive Dormand-Prince 4(5) integration sampled at `grid` (weeks,
/// strictly increasing, grid[0] == 0). Interior grid values come from the
/// method's 4th-order dense-output interpolant; step ends are clamped to the
/// final grid time. Per-step error is measured against
/// max(abs_tol, rel_tol*|y|) componentwise.
///
/// Throws IntegrationError (carrying the last good time) on step-count
/// exhaustion, step-size underflow, non-finite states, or any component
/// undershooting below -1e-9 * (|S0|+|I0|+|R0|).
Trajectory integrate(const Rhs& rhs, const StateVector& y0, std::span<const double> grid,
                     const IntegratorConfig& cfg);

}  // namespace epifit::ode
