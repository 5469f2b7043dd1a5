#include "epifit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epifit::ode {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order error weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kShrinkLimit = 0.2;
constexpr double kGrowLimit = 10.0;

bool finite(const StateVector& y) {
    return std::isfinite(y.s) && std::isfinite(y.i) && std::isfinite(y.r);
}

struct DenseSegment {
    StateVector r1, r2, r3, r4, r5;

    StateVector eval(double theta) const {
        StateVector out;
        double t1 = 1.0 - theta;
        for (int c = 0; c < 3; ++c)
            out[c] = r1[c] + theta * (r2[c] + t1 * (r3[c] + theta * (r4[c] + t1 * r5[c])));
        return out;
    }
};

}  // namespace

IntegratorConfig IntegratorConfig::for_population(double n) {
    IntegratorConfig cfg;
    cfg.abs_tol = 1e-10 * std::max(n, 1.0);
    return cfg;
}

Trajectory integrate(const Rhs& rhs, const StateVector& y0, std::span<const double> grid,
                     const IntegratorConfig& cfg) {
    if (grid.empty()) throw DataError("empty output grid");
    if (grid[0] != 0.0) throw DataError("output grid must start at 0");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw DataError("output grid must be strictly increasing");
    if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) || !(cfg.initial_step > 0) ||
        !(cfg.initial_step <= cfg.max_step) || cfg.max_steps <= 0)
        throw DataError("invalid integrator configuration");
    if (!finite(y0)) throw IntegrationError("non-finite initial state", 0.0);

    const double t_end = grid.back();
    const double neg_floor = -1e-9 * (std::fabs(y0.s) + std::fabs(y0.i) + std::fabs(y0.r));

    Trajectory out;
    out.times.assign(grid.begin(), grid.end());
    out.states.reserve(grid.size());
    out.states.push_back(y0);
    std::size_t next = 1;
    if (next == grid.size()) return out;

    double t = 0.0;
    StateVector y = y0;
    StateVector k1 = rhs(t, y);
    if (!finite(k1)) throw IntegrationError("non-finite state derivative", t);

    double h = std::min(cfg.initial_step, t_end);
    long steps = 0;

    while (next < grid.size()) {
        if (++steps > cfg.max_steps) throw IntegrationError("max step count exceeded", t);
        h = std::min(h, cfg.max_step);
        if (t + h > t_end) h = t_end - t;
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t)))
            throw IntegrationError("step size underflow", t);

        StateVector k2, k3, k4, k5, k6, k7, ynew, ytmp;
        for (int c = 0; c < 3; ++c) ytmp[c] = y[c] + h * a21 * k1[c];
        k2 = rhs(t + c2 * h, ytmp);
        for (int c = 0; c < 3; ++c) ytmp[c] = y[c] + h * (a31 * k1[c] + a32 * k2[c]);
        k3 = rhs(t + c3 * h, ytmp);
        for (int c = 0; c < 3; ++c)
            ytmp[c] = y[c] + h * (a41 * k1[c] + a42 * k2[c] + a43 * k3[c]);
        k4 = rhs(t + c4 * h, ytmp);
        for (int c = 0; c < 3; ++c)
            ytmp[c] = y[c] + h * (a51 * k1[c] + a52 * k2[c] + a53 * k3[c] + a54 * k4[c]);
        k5 = rhs(t + c5 * h, ytmp);
        for (int c = 0; c < 3; ++c)
            ytmp[c] = y[c] + h * (a61 * k1[c] + a62 * k2[c] + a63 * k3[c] + a64 * k4[c] +
                                  a65 * k5[c]);
        k6 = rhs(t + h, ytmp);
        for (int c = 0; c < 3; ++c)
            ynew[c] = y[c] + h * (b1 * k1[c] + b3 * k3[c] + b4 * k4[c] + b5 * k5[c] + b6 * k6[c]);
        k7 = rhs(t + h, ynew);

        double err = 0.0;
        for (int c = 0; c < 3; ++c) {
            double e = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] + e6 * k6[c] +
                            e7 * k7[c]);
            double scale = std::max(cfg.abs_tol,
                                    cfg.rel_tol * std::max(std::fabs(y[c]), std::fabs(ynew[c])));
            err = std::max(err, std::fabs(e) / scale);
        }

        if (!(err <= 1.0)) {  // rejected step (NaN err lands here too)
            double fac = std::isfinite(err) ? std::max(kShrinkLimit, kSafety * std::pow(err, -0.2))
                                            : kShrinkLimit;
            h *= std::min(1.0, fac);
            continue;
        }

        if (!finite(ynew) || !finite(k7)) throw IntegrationError("non-finite state", t);
        for (int c = 0; c < 3; ++c)
            if (ynew[c] < neg_floor) throw IntegrationError("negative compartment undershoot", t);

        DenseSegment seg;
        for (int c = 0; c < 3; ++c) {
            double ydiff = ynew[c] - y[c];
            double bspl = h * k1[c] - ydiff;
            seg.r1[c] = y[c];
            seg.r2[c] = ydiff;
            seg.r3[c] = bspl;
            seg.r4[c] = ydiff - h * k7[c] - bspl;
            seg.r5[c] = h * (d1 * k1[c] + d3 * k3[c] + d4 * k4[c] + d5 * k5[c] + d6 * k6[c] +
                             d7 * k7[c]);
        }
        double t_new = t + h;
        while (next < grid.size() && grid[next] <= t_new) {
            if (grid[next] == t_new)
                out.states.push_back(ynew);
            else
                out.states.push_back(seg.eval((grid[next] - t) / h));
            ++next;
        }

        t = t_new;
        y = ynew;
        k1 = k7;  // FSAL
        double fac = err > 0.0 ? std::clamp(kSafety * std::pow(err, -0.2), kShrinkLimit, kGrowLimit)
                               : kGrowLimit;
        h *= fac;
    }
    return out;
}

}  // namespace epifit::ode
