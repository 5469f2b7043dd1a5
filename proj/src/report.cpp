#include "epifit/report.hpp"

#include <cinttypes>
#include <cstdint>
#include <cstdio>

#include "epifit/version.hpp"

namespace epifit::report {

std::string content_digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
    return buf;
}

nlohmann::json params_block(const fitting::ParamSet& params) {
    nlohmann::json j;
    std::visit(
        [&](const auto& p) {
            double n = p.total();
            j["beta"] = p.beta;
            if constexpr (requires { p.gamma; })
                j["gamma"] = p.gamma;
            else
                j["nu"] = p.nu;
            j["s0"] = p.s0;
            j["i0"] = p.i0;
            j["r0"] = p.r0;
            j["n"] = n;
            j["s0_over_n"] = p.s0 / n;
            j["i0_over_n"] = p.i0 / n;
            j["r0_over_n"] = p.r0 / n;
        },
        params);
    return j;
}

namespace {

nlohmann::json input_block(const RunContext& ctx, const ts::WeeklySeries& data) {
    return {
        {"digest", ctx.input_digest},
        {"end", data.back().stamp.iso()},
        {"path", ctx.input_path},
        {"start", data.front().stamp.iso()},
        {"weeks", data.size()},
    };
}

nlohmann::json fit_block(const fitting::FitResult& fit,
                         const models::ModelKind kind) {
    return {
        {"converged", fit.converged},
        {"evaluations", fit.n_evals},
        {"model", models::to_string(kind)},
        {"params", params_block(fit.params)},
        {"restarts", fit.restarts_used},
        {"sse", fit.sse},
    };
}

models::ModelKind kind_of(const fitting::ParamSet& p) {
    return std::holds_alternative<models::SirParams>(p) ? models::ModelKind::sir
                                                        : models::ModelKind::irsir;
}

nlohmann::json bound_block(const forecast::Bound& b) {
    nlohmann::json j;
    j["feasible"] = b.feasible;
    j["beyond_horizon"] = b.beyond_horizon;
    if (!b.feasible) return j;
    j["params"] = params_block(fitting::ParamSet{b.params});
    j["sse"] = b.sse;
    j["date"] = b.threshold_date ? nlohmann::json(b.threshold_date->month_year())
                                 : nlohmann::json(nullptr);
    j["stamp"] = b.threshold_date ? nlohmann::json(b.threshold_date->iso())
                                  : nlohmann::json(nullptr);
    j["week"] = b.threshold_week ? nlohmann::json(*b.threshold_week) : nlohmann::json(nullptr);
    return j;
}

}  // namespace

nlohmann::json build_fit_report(const RunContext& ctx, const ts::WeeklySeries& data,
                                const fitting::FitResult& fit) {
    return {
        {"command", ctx.command},
        {"config", ctx.config},
        {"fit", fit_block(fit, kind_of(fit.params))},
        {"input", input_block(ctx, data)},
        {"version", kVersion},
    };
}

nlohmann::json build_forecast_report(const RunContext& ctx, const ts::WeeklySeries& data,
                                     const fitting::FitResult& fit,
                                     const forecast::ForecastReport& fc) {
    nlohmann::json forecast_j;
    forecast_j["peak"] = {
        {"date", fc.peak_date.month_year()},
        {"stamp", fc.peak_date.iso()},
        {"value", fc.peak_value},
    };
    forecast_j["threshold"] = {
        {"date", fc.threshold_date ? nlohmann::json(fc.threshold_date->month_year())
                                   : nlohmann::json(nullptr)},
        {"stamp", fc.threshold_date ? nlohmann::json(fc.threshold_date->iso())
                                    : nlohmann::json(nullptr)},
        {"week", fc.threshold_week ? nlohmann::json(*fc.threshold_week)
                                   : nlohmann::json(nullptr)},
    };
    forecast_j["bounds"] = {
        {"early", bound_block(fc.bounds.early)},
        {"late", bound_block(fc.bounds.late)},
        {"sse_cap", fc.bounds.sse_cap},
    };

    nlohmann::json j = build_fit_report(ctx, data, fit);
    j["forecast"] = std::move(forecast_j);
    return j;
}

std::string render(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

}  // namespace epifit::report
