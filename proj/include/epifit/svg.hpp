#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epifit/timeseries.hpp"

namespace epifit::svg {

struct Series {
    std::string label;
    std::string color;   // any CSS color
    bool dashed = false;
    bool points = false;  // draw week markers instead of a continuous line
    std::vector<double> x;  // week offsets from the chart's t0
    std::vector<double> y;
};

struct ChartSpec {
    std::string title;
    std::string y_label;
    ts::WeekStamp t0;  // calendar anchor of week 0, used for year ticks
    int width = 960;
    int height = 540;
    std::optional<double> hline;  // horizontal marker, e.g. a threshold level
    std::vector<Series> series;
};

/// Renders a static line chart. Output is deterministic for identical specs:
/// fixed layout, fixed-precision coordinates, no timestamps or generated ids.
std::string render(const ChartSpec& spec);

}  // namespace epifit::svg
