#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "epifit/models.hpp"
#include "epifit/ode.hpp"
#include "epifit/timeseries.hpp"

namespace epifit::fitting {

/// Sum of squared errors between the trajectory's I component and the data,
/// all weeks weighted equally. The trajectory must be sampled exactly at the
/// data's week offsets (same length).
double sse(const ode::Trajectory& curve, const ts::WeeklySeries& data);

struct OptimizerConfig {
    double x_tol = 1e-10;  // relative simplex-spread tolerance
    double f_tol = 1e-10;  // relative objective-spread tolerance
    long max_iter = 20000; // per restart
    int restarts = 20;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = machine parallelism
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    long n_evals = 0;
    bool converged = false;
};

/// Downhill simplex with the standard reflection/expansion/contraction/
/// shrink coefficients 1, 2, 0.5, 0.5. Converges when both the vertex
/// spread and the objective spread fall below their (floored) relative
/// tolerances. Throws FitError when f(x0) is not finite.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, const OptimizerConfig& cfg);

/// SSE objective for one model family on one data set. Integration failures
/// and absurd parameter decodes evaluate to `penalty` so the simplex
/// retreats from bad regions.
class Objective {
public:
    Objective(const ts::WeeklySeries& data, models::ModelKind kind, ode::IntegratorConfig integ,
              double penalty = 1e12);

    double operator()(const models::SirParams& p) const;
    double operator()(const models::IrSirParams& p) const;

    models::ModelKind kind() const { return kind_; }
    double penalty() const { return penalty_; }
    std::size_t weeks() const { return data_.size(); }
    const std::vector<double>& grid() const { return grid_; }

private:
    double eval(const ode::Rhs& rhs, const ode::StateVector& y0) const;

    std::vector<double> data_;
    std::vector<double> grid_;
    models::ModelKind kind_;
    ode::IntegratorConfig integ_;
    double penalty_;
};

using ParamSet = std::variant<models::SirParams, models::IrSirParams>;

struct FitResult {
    ParamSet params;
    double sse = 0.0;
    long n_evals = 0;
    bool converged = false;
    int restarts_used = 0;
};

/// Minimizes the SSE over log-transformed parameters (positivity without
/// constraints): 4 dimensions for SIR (R0 fixed at 0), 5 for irSIR. Runs
/// `restarts` independent simplex starts, the first from `init` (or scale-
/// aware defaults), the rest from multiplicatively jittered copies
/// (sigma 0.5 in log space), and keeps the lowest SSE; ties go to the lowest
/// restart index. The reported SSE comes from re-integrating the winning
/// parameters. Throws FitError when every restart fails integration.
FitResult fit_model(const ts::WeeklySeries& data, models::ModelKind kind,
                    const std::optional<ParamSet>& init, const OptimizerConfig& opt,
                    const ode::IntegratorConfig& integ);

/// Model I(t) sampled at integer weeks 0..n_weeks-1.
ode::Trajectory model_curve(const ParamSet& params, std::size_t n_weeks,
                            const ode::IntegratorConfig& integ);

}  // namespace epifit::fitting
