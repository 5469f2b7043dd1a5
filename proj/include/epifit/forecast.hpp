#pragma once

#include <optional>

#include "epifit/fitting.hpp"
#include "epifit/models.hpp"
#include "epifit/ode.hpp"
#include "epifit/timeseries.hpp"

namespace epifit::forecast {

struct ThresholdConfig {
    double fraction = 0.20;  // decline threshold as a fraction of peak I
    long horizon = 520;      // weeks to extrapolate beyond the last data point
};

struct BoundsConfig {
    double slack = 0.15;       // relative SSE allowance above the best fit
    int grid_points = 15;      // coarse grid nodes per axis
    double span_decades = 3.0; // log10 half-width of the (R0, nu) search box
    int rays = 16;             // frontier directions scanned from the best point
    int bisect_iters = 12;     // feasibility bisection depth per ray
    int golden_iters = 10;     // golden-section steps over the ray angle
    long refit_max_iter = 4000;
    int threads = 0;
};

/// Integrates the model over integer weeks 0..data_weeks-1+horizon, so the
/// in-sample prefix and the extension come from one integration.
ode::Trajectory extrapolate(const fitting::ParamSet& params, std::size_t data_weeks, long horizon,
                            const ode::IntegratorConfig& integ);

/// Week index where I first falls to fraction*peak after the peak. The peak
/// is the first maximum of I; the crossing is located by linear interpolation
/// between the bracketing samples and assigned to the week containing it.
/// Empty when I never drops that far within the trajectory.
std::optional<long> threshold_week(const ode::Trajectory& traj, double fraction);

/// Calendar stamp of the threshold week, anchored at t0 = week 0.
std::optional<ts::WeekStamp> threshold_date(const ode::Trajectory& traj, double fraction,
                                            ts::WeekStamp t0);

struct Bound {
    models::IrSirParams params{};
    double sse = 0.0;
    std::optional<long> threshold_week;
    std::optional<ts::WeekStamp> threshold_date;
    bool feasible = false;        // some curve within the SSE cap reaches the threshold
    bool beyond_horizon = false;  // a curve within the cap never reaches it in the horizon
};

struct BoundsResult {
    Bound early;
    Bound late;
    double sse_cap = 0.0;
};

/// Finds the earliest and latest threshold dates over irSIR curves whose SSE
/// stays within (1+slack) of the best fit. Two-stage search in the
/// (log10 R0, log10 nu) plane around the best fit: a coarse grid with
/// (beta, S0, I0) re-optimized at each node, then feasibility bisection
/// along rays from the best point with golden-section refinement over the
/// ray angle. The best fit itself is always a candidate, so the bounds
/// bracket its date whenever all three dates exist. Reported SSE values are
/// re-derived from the winning parameters by re-integration.
BoundsResult prediction_bounds(const ts::WeeklySeries& data, const fitting::FitResult& best,
                               const BoundsConfig& bounds, const ThresholdConfig& thresh,
                               const ode::IntegratorConfig& integ);

struct ForecastReport {
    ode::Trajectory best_curve;  // extrapolated over the data span plus horizon
    double peak_value = 0.0;
    ts::WeekStamp peak_date;
    std::optional<long> threshold_week;
    std::optional<ts::WeekStamp> threshold_date;
    BoundsResult bounds;
};

ForecastReport make_forecast(const ts::WeeklySeries& data, const fitting::FitResult& best,
                             const ThresholdConfig& thresh, const BoundsConfig& bounds,
                             const ode::IntegratorConfig& integ);

}  // namespace epifit::forecast
