#include "epifit/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "epifit/errors.hpp"
#include "parallel.hpp"

namespace epifit::forecast {

namespace {

void check_threshold_config(const ThresholdConfig& cfg) {
    if (!(cfg.fraction > 0.0 && cfg.fraction < 1.0))
        throw FitError("threshold fraction must be in (0, 1)");
    if (cfg.horizon <= 0) throw FitError("horizon must be positive");
}

void check_bounds_config(const BoundsConfig& cfg) {
    if (!(cfg.slack >= 0.0)) throw FitError("slack must be non-negative");
    if (cfg.grid_points < 2) throw FitError("grid_points must be at least 2");
    if (!(cfg.span_decades > 0.0)) throw FitError("span_decades must be positive");
    if (cfg.rays < 4) throw FitError("rays must be at least 4");
    if (cfg.bisect_iters < 1 || cfg.golden_iters < 0 || cfg.refit_max_iter < 1)
        throw FitError("bounds refinement controls must be positive");
}

}  // namespace

ode::Trajectory extrapolate(const fitting::ParamSet& params, std::size_t data_weeks, long horizon,
                            const ode::IntegratorConfig& integ) {
    if (data_weeks == 0) throw FitError("extrapolate: need at least one data week");
    if (horizon < 0) throw FitError("extrapolate: horizon must be non-negative");
    return fitting::model_curve(params, data_weeks + static_cast<std::size_t>(horizon), integ);
}

std::optional<long> threshold_week(const ode::Trajectory& traj, double fraction) {
    if (traj.size() == 0) throw FitError("threshold_week: empty trajectory");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw FitError("threshold fraction must be in (0, 1)");

    std::size_t peak = 0;
    for (std::size_t k = 1; k < traj.size(); ++k)
        if (traj.states[k].i > traj.states[peak].i) peak = k;

    double level = fraction * traj.states[peak].i;
    for (std::size_t k = peak + 1; k < traj.size(); ++k) {
        double prev = traj.states[k - 1].i;
        double cur = traj.states[k].i;
        if (cur <= level) {
            // prev > level >= cur here, so the crossing sits inside this
            // interval; assign it to the week the crossing time lands in.
            double t = traj.times[k - 1] +
                       (prev - level) / (prev - cur) * (traj.times[k] - traj.times[k - 1]);
            return static_cast<long>(std::ceil(t - 1e-9));
        }
    }
    return std::nullopt;
}

std::optional<ts::WeekStamp> threshold_date(const ode::Trajectory& traj, double fraction,
                                            ts::WeekStamp t0) {
    auto week = threshold_week(traj, fraction);
    if (!week) return std::nullopt;
    return t0.plus_weeks(*week);
}

namespace {

struct Candidate {
    models::IrSirParams params{};
    double sse = std::numeric_limits<double>::infinity();
    std::optional<long> week;
    bool valid = false;  // sse within cap and extended integration succeeded
};

class BoundsSearch {
public:
    BoundsSearch(const ts::WeeklySeries& data, const models::IrSirParams& best, double cap,
                 const BoundsConfig& bcfg, const ThresholdConfig& tcfg,
                 const ode::IntegratorConfig& integ)
        : objective_(data, models::ModelKind::irsir, integ),
          data_weeks_(data.size()),
          best_(best),
          cap_(cap),
          bcfg_(bcfg),
          tcfg_(tcfg),
          integ_(integ) {
        refit_opt_.x_tol = 1e-8;
        refit_opt_.f_tol = 1e-7;
        refit_opt_.max_iter = bcfg.refit_max_iter;
        start3_ = {std::log(best.beta), std::log(best.s0), std::log(best.i0)};
    }

    /// Re-optimizes (beta, S0, I0) with (r0, nu) frozen, one deterministic
    /// simplex run from the best fit's values.
    std::pair<models::IrSirParams, double> refit(double r0, double nu) const {
        auto f = [&](std::span<const double> x) {
            models::IrSirParams p;
            p.beta = std::exp(x[0]);
            p.nu = nu;
            p.s0 = std::exp(x[1]);
            p.i0 = std::exp(x[2]);
            p.r0 = r0;
            return objective_(p);
        };
        auto res = fitting::nelder_mead(f, start3_, refit_opt_);
        models::IrSirParams p;
        p.beta = std::exp(res.x[0]);
        p.nu = nu;
        p.s0 = std::exp(res.x[1]);
        p.i0 = std::exp(res.x[2]);
        p.r0 = r0;
        return {p, res.fx};
    }

    Candidate make_candidate(const models::IrSirParams& p, double sse) const {
        Candidate c;
        c.params = p;
        c.sse = sse;
        if (!(sse <= cap_)) return c;
        ode::Trajectory traj;
        try {
            traj = extrapolate(fitting::ParamSet{p}, data_weeks_, tcfg_.horizon, integ_);
        } catch (const IntegrationError&) {
            return c;  // cannot say anything about this curve's future
        }
        c.week = threshold_week(traj, tcfg_.fraction);
        c.valid = true;
        return c;
    }

    Candidate candidate_at(double log10_r0, double log10_nu) const {
        auto [p, s] = refit(std::pow(10.0, log10_r0), std::pow(10.0, log10_nu));
        return make_candidate(p, s);
    }

    /// Bisects the feasibility boundary along the ray at `theta` from the
    /// best point, up to span_decades away. Returns the outermost feasible
    /// candidate found (the box edge when feasibility never breaks).
    Candidate frontier(double theta) const {
        double lr0 = std::log10(best_.r0);
        double lnu = std::log10(best_.nu);
        double dr = bcfg_.span_decades * std::cos(theta);
        double dn = bcfg_.span_decades * std::sin(theta);
        auto at = [&](double t) { return candidate_at(lr0 + t * dr, lnu + t * dn); };

        Candidate edge = at(1.0);
        if (edge.valid) return edge;

        Candidate best_feasible;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < bcfg_.bisect_iters; ++it) {
            double mid = 0.5 * (lo + hi);
            Candidate c = at(mid);
            if (c.valid) {
                lo = mid;
                best_feasible = c;
            } else {
                hi = mid;
            }
        }
        return best_feasible;  // may be invalid when the feasible radius is tiny
    }

    const BoundsConfig& config() const { return bcfg_; }

private:
    fitting::Objective objective_;
    std::size_t data_weeks_;
    models::IrSirParams best_;
    double cap_;
    BoundsConfig bcfg_;
    ThresholdConfig tcfg_;
    ode::IntegratorConfig integ_;
    fitting::OptimizerConfig refit_opt_;
    std::vector<double> start3_;
};

/// Golden-section over the ray angle. `score` must map a candidate to the
/// value being minimized; infeasible rays score +inf. Every evaluated
/// candidate is appended to `pool` so the final merge sees them all.
void golden_refine(const BoundsSearch& search, double theta_lo, double theta_hi, int iters,
                   const std::function<double(const Candidate&)>& score,
                   std::vector<Candidate>& pool) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = theta_lo, b = theta_hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    Candidate c1 = search.frontier(x1);
    Candidate c2 = search.frontier(x2);
    pool.push_back(c1);
    pool.push_back(c2);
    double f1 = score(c1), f2 = score(c2);
    for (int it = 0; it < iters; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            c1 = search.frontier(x1);
            pool.push_back(c1);
            f1 = score(c1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            c2 = search.frontier(x2);
            pool.push_back(c2);
            f2 = score(c2);
        }
    }
}

}  // namespace

BoundsResult prediction_bounds(const ts::WeeklySeries& data, const fitting::FitResult& best,
                               const BoundsConfig& bounds, const ThresholdConfig& thresh,
                               const ode::IntegratorConfig& integ) {
    check_threshold_config(thresh);
    check_bounds_config(bounds);
    const auto* best_params = std::get_if<models::IrSirParams>(&best.params);
    if (!best_params) throw FitError("prediction_bounds: best fit must be an irSIR fit");
    if (!(best_params->r0 > 0.0) || !(best_params->nu > 0.0))
        throw FitError("prediction_bounds: best fit needs positive R0 and nu");
    if (!(best.sse >= 0.0) || !std::isfinite(best.sse))
        throw FitError("prediction_bounds: best fit SSE must be finite");

    BoundsSearch search(data, *best_params, (1.0 + bounds.slack) * best.sse, bounds, thresh,
                        integ);

    std::vector<Candidate> pool;
    pool.push_back(search.make_candidate(*best_params, best.sse));

    // Coarse grid over the (log10 R0, log10 nu) box, row-major slots so the
    // pool order does not depend on scheduling.
    const int g = bounds.grid_points;
    const double lr0 = std::log10(best_params->r0);
    const double lnu = std::log10(best_params->nu);
    std::vector<Candidate> grid(static_cast<std::size_t>(g) * static_cast<std::size_t>(g));
    detail::parallel_for(grid.size(), bounds.threads, [&](std::size_t idx) {
        int gi = static_cast<int>(idx) / g;
        int gj = static_cast<int>(idx) % g;
        double u = -1.0 + 2.0 * static_cast<double>(gi) / (g - 1);
        double v = -1.0 + 2.0 * static_cast<double>(gj) / (g - 1);
        grid[idx] = search.candidate_at(lr0 + bounds.span_decades * u,
                                        lnu + bounds.span_decades * v);
    });
    pool.insert(pool.end(), grid.begin(), grid.end());

    // Feasibility frontier along evenly spaced rays.
    std::vector<Candidate> ray_hits(static_cast<std::size_t>(bounds.rays));
    detail::parallel_for(ray_hits.size(), bounds.threads, [&](std::size_t m) {
        double theta = 2.0 * std::numbers::pi * static_cast<double>(m) /
                       static_cast<double>(bounds.rays);
        ray_hits[m] = search.frontier(theta);
    });
    pool.insert(pool.end(), ray_hits.begin(), ray_hits.end());

    // Golden-section over the angle around the most extreme rays. Scores:
    // early minimizes the week; late maximizes it, with "no crossing"
    // outranking every finite week.
    auto early_score = [](const Candidate& c) {
        return (c.valid && c.week) ? static_cast<double>(*c.week)
                                   : std::numeric_limits<double>::infinity();
    };
    auto late_score = [](const Candidate& c) {
        if (!c.valid) return std::numeric_limits<double>::infinity();
        if (!c.week) return -std::numeric_limits<double>::infinity();
        return -static_cast<double>(*c.week);
    };
    const double step = 2.0 * std::numbers::pi / static_cast<double>(bounds.rays);
    for (const auto& score : {std::function<double(const Candidate&)>(early_score),
                              std::function<double(const Candidate&)>(late_score)}) {
        std::size_t seed = 0;
        bool found = false;
        for (std::size_t m = 0; m < ray_hits.size(); ++m) {
            if (!ray_hits[m].valid) continue;
            if (!found || score(ray_hits[m]) < score(ray_hits[seed])) {
                seed = m;
                found = true;
            }
        }
        if (!found || bounds.golden_iters == 0) continue;
        double theta = step * static_cast<double>(seed);
        golden_refine(search, theta - step, theta + step, bounds.golden_iters, score, pool);
    }

    // Merge. First extreme in pool order wins ties, which keeps the result
    // independent of thread scheduling.
    const Candidate* early = nullptr;
    const Candidate* late = nullptr;
    const Candidate* no_crossing = nullptr;
    for (const auto& c : pool) {
        if (!c.valid) continue;
        if (c.week) {
            if (!early || *c.week < *early->week) early = &c;
            if (!late || *c.week > *late->week) late = &c;
        } else if (!no_crossing) {
            no_crossing = &c;
        }
    }

    BoundsResult out;
    out.sse_cap = (1.0 + bounds.slack) * best.sse;
    ts::WeekStamp t0 = data.front().stamp;

    auto fill = [&](Bound& b, const Candidate& c, bool beyond) {
        b.params = c.params;
        b.threshold_week = c.week;
        if (c.week) b.threshold_date = t0.plus_weeks(*c.week);
        b.feasible = true;
        b.beyond_horizon = beyond;
        // The optimizer's cached SSE could in principle drift from the
        // parameters it reports; re-derive it so the cap check is honest.
        b.sse = fitting::sse(fitting::model_curve(fitting::ParamSet{c.params}, data.size(), integ),
                             data);
    };

    if (early) fill(out.early, *early, false);
    if (no_crossing) {
        fill(out.late, *no_crossing, true);
    } else if (late) {
        fill(out.late, *late, false);
    }
    return out;
}

ForecastReport make_forecast(const ts::WeeklySeries& data, const fitting::FitResult& best,
                             const ThresholdConfig& thresh, const BoundsConfig& bounds,
                             const ode::IntegratorConfig& integ) {
    check_threshold_config(thresh);
    const auto* best_params = std::get_if<models::IrSirParams>(&best.params);
    if (!best_params) throw FitError("make_forecast: best fit must be an irSIR fit");

    ForecastReport report;
    report.best_curve = extrapolate(best.params, data.size(), thresh.horizon, integ);

    std::size_t peak = 0;
    for (std::size_t k = 1; k < report.best_curve.size(); ++k)
        if (report.best_curve.states[k].i > report.best_curve.states[peak].i) peak = k;
    report.peak_value = report.best_curve.states[peak].i;
    ts::WeekStamp t0 = data.front().stamp;
    report.peak_date = t0.plus_weeks(static_cast<long>(peak));

    report.threshold_week = threshold_week(report.best_curve, thresh.fraction);
    if (report.threshold_week)
        report.threshold_date = t0.plus_weeks(*report.threshold_week);

    report.bounds = prediction_bounds(data, best, bounds, thresh, integ);
    return report;
}

}  // namespace epifit::forecast
