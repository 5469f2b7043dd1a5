#include "epifit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "epifit/errors.hpp"
#include "parallel.hpp"

namespace epifit::fitting {

namespace {

constexpr double kParamCeiling = 1e8;  // decoded values beyond this are junk

std::vector<double> week_grid(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i);
    return g;
}

}  // namespace

double sse(const ode::Trajectory& curve, const ts::WeeklySeries& data) {
    if (curve.size() != data.size())
        throw FitError("trajectory and data length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double d = curve.states[i].i - data.value(i);
        total += d * d;
    }
    return total;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, const OptimizerConfig& cfg) {
    const std::size_t n = x0.size();
    if (n == 0) throw FitError("nelder_mead: empty start point");

    long n_evals = 0;
    auto eval = [&](std::span<const double> x) {
        ++n_evals;
        double v = f(x);
        // NaN would poison the vertex ordering; treat it as a hard wall.
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    double f0 = eval(x0);
    if (!std::isfinite(f0)) throw FitError("nelder_mead: objective not finite at start point");

    // fminsearch-style initial simplex: perturb one coordinate per vertex by
    // 5%, or by a small absolute nudge when the coordinate is zero.
    std::vector<std::vector<double>> verts(n + 1, std::vector<double>(x0.begin(), x0.end()));
    std::vector<double> fvals(n + 1);
    fvals[0] = f0;
    for (std::size_t j = 0; j < n; ++j) {
        double& c = verts[j + 1][j];
        c = (c != 0.0) ? c * 1.05 : 0.00025;
        fvals[j + 1] = eval(verts[j + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto sort_order = [&] {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    };

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    bool converged = false;
    for (long iter = 0; iter < cfg.max_iter; ++iter) {
        sort_order();
        const auto& best = verts[order[0]];
        const auto& worst = verts[order[n]];
        double f_best = fvals[order[0]];
        double f_worst = fvals[order[n]];

        double xspread = 0.0;
        for (std::size_t v = 1; v <= n; ++v)
            for (std::size_t j = 0; j < n; ++j)
                xspread = std::max(xspread, std::abs(verts[order[v]][j] - best[j]));
        double xscale = 0.0;
        for (std::size_t j = 0; j < n; ++j) xscale = std::max(xscale, std::abs(best[j]));
        double fspread = f_worst - f_best;
        if (xspread <= cfg.x_tol * std::max(1.0, xscale) &&
            fspread <= cfg.f_tol * std::max(1.0, std::abs(f_best))) {
            converged = true;
            break;
        }

        // Centroid of all vertices except the worst.
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += verts[order[v]][j];
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - worst[j]);
        double f_r = eval(xr);
        double f_second = fvals[order[n - 1]];

        if (f_r < fvals[order[0]]) {
            for (std::size_t j = 0; j < n; ++j)
                xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            double f_e = eval(xe);
            if (f_e < f_r) {
                verts[order[n]] = xe;
                fvals[order[n]] = f_e;
            } else {
                verts[order[n]] = xr;
                fvals[order[n]] = f_r;
            }
            continue;
        }
        if (f_r < f_second) {
            verts[order[n]] = xr;
            fvals[order[n]] = f_r;
            continue;
        }

        bool outside = f_r < f_worst;
        const auto& base = outside ? xr : worst;
        for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + rho * (base[j] - centroid[j]);
        double f_c = eval(xc);
        if (f_c < (outside ? f_r : f_worst)) {
            verts[order[n]] = xc;
            fvals[order[n]] = f_c;
            continue;
        }

        // Shrink toward the best vertex.
        for (std::size_t v = 1; v <= n; ++v) {
            auto& vert = verts[order[v]];
            for (std::size_t j = 0; j < n; ++j) vert[j] = best[j] + sigma * (vert[j] - best[j]);
            fvals[order[v]] = eval(vert);
        }
    }

    sort_order();
    NelderMeadResult out;
    out.x = verts[order[0]];
    out.fx = fvals[order[0]];
    out.n_evals = n_evals;
    out.converged = converged;
    return out;
}

Objective::Objective(const ts::WeeklySeries& data, models::ModelKind kind,
                     ode::IntegratorConfig integ, double penalty)
    : data_(data.values()),
      grid_(week_grid(data.size())),
      kind_(kind),
      integ_(integ),
      penalty_(penalty) {}

double Objective::eval(const ode::Rhs& rhs, const ode::StateVector& y0) const {
    ode::Trajectory traj;
    try {
        traj = ode::integrate(rhs, y0, grid_, integ_);
    } catch (const IntegrationError&) {
        return penalty_;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        double d = traj.states[i].i - data_[i];
        total += d * d;
    }
    return std::isfinite(total) ? total : penalty_;
}

double Objective::operator()(const models::SirParams& p) const {
    for (double v : {p.beta, p.gamma, p.s0, p.i0, p.r0})
        if (!std::isfinite(v) || v > kParamCeiling) return penalty_;
    return eval(models::make_rhs(p), models::initial_state(p));
}

double Objective::operator()(const models::IrSirParams& p) const {
    for (double v : {p.beta, p.nu, p.s0, p.i0, p.r0})
        if (!std::isfinite(v) || v > kParamCeiling) return penalty_;
    return eval(models::make_rhs(p), models::initial_state(p));
}

namespace {

// Log-space encode/decode. SIR optimizes (beta, gamma, s0, i0) with r0
// pinned at zero; irSIR optimizes all five of (beta, nu, s0, i0, r0).
std::vector<double> encode(const ParamSet& p) {
    std::vector<double> x;
    if (const auto* s = std::get_if<models::SirParams>(&p)) {
        x = {std::log(s->beta), std::log(s->gamma), std::log(s->s0), std::log(s->i0)};
    } else {
        const auto& q = std::get<models::IrSirParams>(p);
        x = {std::log(q.beta), std::log(q.nu), std::log(q.s0), std::log(q.i0), std::log(q.r0)};
    }
    return x;
}

ParamSet decode(models::ModelKind kind, std::span<const double> x) {
    if (kind == models::ModelKind::sir) {
        models::SirParams p;
        p.beta = std::exp(x[0]);
        p.gamma = std::exp(x[1]);
        p.s0 = std::exp(x[2]);
        p.i0 = std::exp(x[3]);
        p.r0 = 0.0;
        return p;
    }
    models::IrSirParams p;
    p.beta = std::exp(x[0]);
    p.nu = std::exp(x[1]);
    p.s0 = std::exp(x[2]);
    p.i0 = std::exp(x[3]);
    p.r0 = std::exp(x[4]);
    return p;
}

ParamSet default_init(const ts::WeeklySeries& data, models::ModelKind kind) {
    double peak = data.max_value();
    double s0 = peak > 0.0 ? peak : 1.0;
    double i0 = std::max(data.value(0), 0.01);
    if (kind == models::ModelKind::sir) {
        models::SirParams p;
        p.beta = 0.05;
        p.gamma = 0.05;
        p.s0 = s0;
        p.i0 = i0;
        p.r0 = 0.0;
        return p;
    }
    models::IrSirParams p;
    p.beta = 0.05;
    p.nu = 0.05;
    p.s0 = s0;
    p.i0 = i0;
    p.r0 = 0.01 * s0;
    return p;
}

}  // namespace

FitResult fit_model(const ts::WeeklySeries& data, models::ModelKind kind,
                    const std::optional<ParamSet>& init, const OptimizerConfig& opt,
                    const ode::IntegratorConfig& integ) {
    if (opt.restarts < 1) throw FitError("fit_model: restarts must be at least 1");
    if (data.size() < 3) throw FitError("fit_model: need at least 3 weeks of data");

    ParamSet start = init ? *init : default_init(data, kind);
    bool kind_matches = (kind == models::ModelKind::sir)
                            ? std::holds_alternative<models::SirParams>(start)
                            : std::holds_alternative<models::IrSirParams>(start);
    if (!kind_matches) throw FitError("fit_model: initial guess does not match model kind");

    Objective objective(data, kind, integ);
    std::vector<double> x0 = encode(start);
    const std::size_t dim = x0.size();

    // Jitter sequences are drawn up front from a single generator so the
    // start points do not depend on how restarts are scheduled across
    // threads. Restart 0 keeps the unjittered guess.
    std::vector<std::vector<double>> starts(static_cast<std::size_t>(opt.restarts), x0);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    for (int r = 1; r < opt.restarts; ++r)
        for (std::size_t j = 0; j < dim; ++j) starts[static_cast<std::size_t>(r)][j] += jitter(rng);

    auto f = [&](std::span<const double> x) {
        return std::visit(objective, decode(kind, x));
    };

    std::vector<NelderMeadResult> results(starts.size());
    detail::parallel_for(starts.size(), opt.threads, [&](std::size_t r) {
        results[r] = nelder_mead(f, starts[r], opt);
    });

    // Deterministic merge: lowest SSE wins, ties broken by restart index.
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].fx < results[best].fx) best = r;

    if (results[best].fx >= objective.penalty())
        throw FitError("fit_model: no restart produced an integrable fit");

    FitResult out;
    out.params = decode(kind, results[best].x);
    out.n_evals = 0;
    for (const auto& r : results) out.n_evals += r.n_evals;
    out.converged = results[best].converged;
    out.restarts_used = opt.restarts;
    // Re-derive the reported SSE from the decoded parameters so it matches
    // what model_curve produces, not the optimizer's cached value.
    out.sse = sse(model_curve(out.params, data.size(), integ), data);
    return out;
}

ode::Trajectory model_curve(const ParamSet& params, std::size_t n_weeks,
                            const ode::IntegratorConfig& integ) {
    if (n_weeks == 0) throw FitError("model_curve: need at least one week");
    std::vector<double> grid = week_grid(n_weeks);
    return std::visit(
        [&](const auto& p) {
            return ode::integrate(models::make_rhs(p), models::initial_state(p), grid, integ);
        },
        params);
}

}  // namespace epifit::fitting
