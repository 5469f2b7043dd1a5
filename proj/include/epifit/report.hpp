#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "epifit/fitting.hpp"
#include "epifit/forecast.hpp"
#include "epifit/timeseries.hpp"

namespace epifit::report {

/// FNV-1a 64-bit hash of the raw bytes, formatted "fnv1a64:<16 hex digits>".
std::string content_digest(std::string_view bytes);

struct RunContext {
    std::string command;
    std::string input_path;
    std::string input_digest;
    nlohmann::json config;  // echo of every flag that affects the numbers
};

/// Model parameters both absolute and as fractions of N, so reports can be
/// read either way without recomputation.
nlohmann::json params_block(const fitting::ParamSet& params);

nlohmann::json build_fit_report(const RunContext& ctx, const ts::WeeklySeries& data,
                                const fitting::FitResult& fit);

nlohmann::json build_forecast_report(const RunContext& ctx, const ts::WeeklySeries& data,
                                     const fitting::FitResult& fit,
                                     const forecast::ForecastReport& fc);

/// Key-sorted, indented serialization with a trailing newline. Byte-stable
/// for identical report objects.
std::string render(const nlohmann::json& j);

}  // namespace epifit::report
