#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epifit/errors.hpp"
#include "epifit/fitting.hpp"
#include "epifit/forecast.hpp"
#include "epifit/models.hpp"
#include "epifit/report.hpp"
#include "epifit/svg.hpp"
#include "epifit/timeseries.hpp"
#include "epifit/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace epifit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw DataError("cannot read '" + path + "'");
    return std::move(buf).str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw DataError("cannot write '" + path.string() + "'");
}

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("EPIFIT_OUT_DIR"); env && *env) return env;
    return ".";
}

struct CommonArgs {
    std::string out_dir;
    int threads = 0;
    bool no_svg = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--out", args.out_dir,
                    "Artifact directory (default: $EPIFIT_OUT_DIR, else current directory)");
    cmd->add_option("--threads", args.threads, "Worker threads, 0 = machine parallelism")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--no-svg", args.no_svg, "Skip the SVG plot artifact");
}

struct FitArgs {
    CommonArgs common;
    std::string path;
    std::string model;
    std::uint64_t seed = 0;
    int restarts = 20;
    double rel_tol = 1e-8;
};

struct ForecastArgs {
    FitArgs fit;
    double fraction = 0.20;
    double slack = 0.15;
    long horizon = 520;
    int grid_points = 15;
    int rays = 16;
};

void add_fit_options(CLI::App* cmd, FitArgs& args, bool fixed_model) {
    if (fixed_model) {
        args.model = "irsir";
        cmd->add_option("--model", args.model, "Model family (forecasting supports irsir only)")
            ->check(CLI::IsMember({"irsir"}));
    } else {
        cmd->add_option("--model", args.model, "Model family")
            ->required()
            ->check(CLI::IsMember({"sir", "irsir"}));
    }
    cmd->add_option("--seed", args.seed, "Seed for the restart jitter sequence");
    cmd->add_option("--restarts", args.restarts, "Independent optimizer starts")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rel-tol", args.rel_tol,
                    "Integrator relative tolerance (absolute tolerance scales with it)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("path", args.path, "Canonical weekly CSV")->required();
    add_common(cmd, args.common);
}

ode::IntegratorConfig integrator_for(const ts::WeeklySeries& data, double rel_tol) {
    ode::IntegratorConfig cfg = ode::IntegratorConfig::for_population(data.max_value());
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = rel_tol * 1e-2 * std::max(data.max_value(), 1.0);
    return cfg;
}

std::string curve_csv(const ode::Trajectory& traj, ts::WeekStamp t0) {
    std::string out;
    out.reserve(traj.size() * 28);
    char buf[40];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", traj.states[i].i);
        out += t0.plus_weeks(static_cast<long>(i)).iso();
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

svg::Series data_series(const ts::WeeklySeries& data) {
    svg::Series s;
    s.label = "data";
    s.color = "#1f77b4";
    s.points = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(data.value(i));
    }
    return s;
}

svg::Series curve_series(const ode::Trajectory& traj, const std::string& label,
                         const std::string& color, bool dashed) {
    svg::Series s;
    s.label = label;
    s.color = color;
    s.dashed = dashed;
    s.x = traj.times;
    for (const auto& y : traj.states) s.y.push_back(y.i);
    return s;
}

void emit_artifacts(const CommonArgs& common, const nlohmann::json& report_json,
                    const std::string& curve, const std::optional<std::string>& plot) {
    fs::path dir = resolve_out_dir(common.out_dir);
    fs::create_directories(dir);
    std::string rendered = report::render(report_json);
    write_file(dir / "report.json", rendered);
    write_file(dir / "curve.csv", curve);
    if (plot) write_file(dir / "plot.svg", *plot);
    std::cout << rendered;
}

int cmd_preprocess(const std::vector<std::string>& paths, const std::string& cut,
                   double factor, bool have_correction, const std::string& reference) {
    ts::SegmentSet segments;
    for (const auto& p : paths) segments.push_back(ts::parse_csv(read_file(p)));
    ts::WeeklySeries series = ts::stitch(segments);
    if (have_correction)
        series = ts::apply_step_correction(series, ts::WeekStamp::parse(cut), factor);
    if (!reference.empty()) {
        ts::WeeklySeries ref = ts::parse_csv(read_file(reference));
        series = ts::normalize(series, &ref);
    } else {
        series = ts::normalize(series);
    }
    std::cout << ts::to_csv(series);
    return kExitOk;
}

int cmd_fit(const FitArgs& args) {
    std::string csv = read_file(args.path);
    ts::WeeklySeries data = ts::parse_csv(csv);
    models::ModelKind kind = models::model_kind_from_string(args.model);

    fitting::OptimizerConfig opt;
    opt.restarts = args.restarts;
    opt.seed = args.seed;
    opt.threads = args.common.threads;
    ode::IntegratorConfig integ = integrator_for(data, args.rel_tol);

    fitting::FitResult fit = fitting::fit_model(data, kind, std::nullopt, opt, integ);
    ode::Trajectory curve = fitting::model_curve(fit.params, data.size(), integ);

    report::RunContext ctx;
    ctx.command = "fit";
    ctx.input_path = args.path;
    ctx.input_digest = report::content_digest(csv);
    ctx.config = {
        {"model", args.model},     {"rel_tol", args.rel_tol},
        {"restarts", args.restarts}, {"seed", args.seed},
    };

    std::optional<std::string> plot;
    if (!args.common.no_svg) {
        svg::ChartSpec chart;
        chart.title = "Weekly activity and fitted " + args.model + " curve";
        chart.y_label = "relative weekly activity";
        chart.t0 = data.front().stamp;
        chart.series = {data_series(data), curve_series(curve, args.model + " fit", "#d62728", false)};
        plot = svg::render(chart);
    }
    emit_artifacts(args.common, report::build_fit_report(ctx, data, fit),
                   curve_csv(curve, data.front().stamp), plot);
    return kExitOk;
}

int cmd_forecast(const ForecastArgs& args) {
    std::string csv = read_file(args.fit.path);
    ts::WeeklySeries data = ts::parse_csv(csv);

    fitting::OptimizerConfig opt;
    opt.restarts = args.fit.restarts;
    opt.seed = args.fit.seed;
    opt.threads = args.fit.common.threads;
    ode::IntegratorConfig integ = integrator_for(data, args.fit.rel_tol);

    forecast::ThresholdConfig thresh;
    thresh.fraction = args.fraction;
    thresh.horizon = args.horizon;
    forecast::BoundsConfig bounds;
    bounds.slack = args.slack;
    bounds.grid_points = args.grid_points;
    bounds.rays = args.rays;
    bounds.threads = args.fit.common.threads;

    fitting::FitResult fit =
        fitting::fit_model(data, models::ModelKind::irsir, std::nullopt, opt, integ);
    forecast::ForecastReport fc = forecast::make_forecast(data, fit, thresh, bounds, integ);

    report::RunContext ctx;
    ctx.command = "forecast";
    ctx.input_path = args.fit.path;
    ctx.input_digest = report::content_digest(csv);
    ctx.config = {
        {"fraction", args.fraction},       {"grid_points", args.grid_points},
        {"horizon", args.horizon},         {"model", args.fit.model},
        {"rays", args.rays},               {"rel_tol", args.fit.rel_tol},
        {"restarts", args.fit.restarts},   {"seed", args.fit.seed},
        {"slack", args.slack},
    };

    std::optional<std::string> plot;
    if (!args.fit.common.no_svg) {
        svg::ChartSpec chart;
        chart.title = "Forecast with earliest/latest decline curves";
        chart.y_label = "relative weekly activity";
        chart.t0 = data.front().stamp;
        chart.hline = args.fraction * fc.peak_value;
        chart.series = {data_series(data),
                        curve_series(fc.best_curve, "best fit", "#d62728", false)};
        auto add_bound = [&](const forecast::Bound& b, const std::string& label,
                             const std::string& color) {
            if (!b.feasible) return;
            ode::Trajectory t = forecast::extrapolate(fitting::ParamSet{b.params}, data.size(),
                                                      args.horizon, integ);
            chart.series.push_back(curve_series(t, label, color, true));
        };
        add_bound(fc.bounds.early, "earliest decline", "#2ca02c");
        add_bound(fc.bounds.late, "latest decline", "#9467bd");
        plot = svg::render(chart);
    }
    emit_artifacts(args.fit.common, report::build_forecast_report(ctx, data, fit, fc),
                   curve_csv(fc.best_curve, data.front().stamp), plot);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epidemic-style model fitting and decline forecasting for weekly time series"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    auto* pre = app.add_subcommand("preprocess",
                                   "Stitch, correct, and normalize weekly CSV segments");
    std::vector<std::string> pre_paths;
    std::string pre_cut, pre_reference;
    double pre_factor = 1.0;
    auto* cut_opt = pre->add_option("--cut", pre_cut, "Step-correction cut date (YYYY-MM-DD)");
    auto* factor_opt =
        pre->add_option("--factor", pre_factor, "Multiplier for values after the cut date");
    cut_opt->needs(factor_opt);
    factor_opt->needs(cut_opt);
    pre->add_option("--reference", pre_reference, "Series whose maximum defines 100");
    pre->add_option("paths", pre_paths, "Segment CSVs, earliest first")->required();

    auto* fit_cmd = app.add_subcommand("fit", "Fit a compartment model to a weekly CSV");
    FitArgs fit_args;
    add_fit_options(fit_cmd, fit_args, false);

    auto* fc_cmd = app.add_subcommand(
        "forecast", "Fit, extrapolate, and bound the decline date of a weekly CSV");
    ForecastArgs fc_args;
    add_fit_options(fc_cmd, fc_args.fit, true);
    fc_cmd->add_option("--fraction", fc_args.fraction, "Decline threshold as a fraction of peak")
        ->check(CLI::Range(1e-9, 1.0));
    fc_cmd->add_option("--slack", fc_args.slack, "Relative SSE allowance for the bound curves")
        ->check(CLI::NonNegativeNumber);
    fc_cmd->add_option("--horizon", fc_args.horizon, "Weeks to extrapolate past the data")
        ->check(CLI::PositiveNumber);
    fc_cmd->add_option("--grid-points", fc_args.grid_points, "Coarse bound-search grid per axis")
        ->check(CLI::Range(2, 101));
    fc_cmd->add_option("--rays", fc_args.rays, "Frontier directions in the bound search")
        ->check(CLI::Range(4, 256));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (pre->parsed())
            return cmd_preprocess(pre_paths, pre_cut, pre_factor, cut_opt->count() > 0,
                                  pre_reference);
        if (fit_cmd->parsed()) return cmd_fit(fit_args);
        return cmd_forecast(fc_args);
    } catch (const ParseError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return kExitData;
    } catch (const DataError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return kExitData;
    } catch (const IntegrationError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return kExitNumeric;
    } catch (const FitError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return kExitNumeric;
    }
}
