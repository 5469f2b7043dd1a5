#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epifit/errors.hpp"

namespace epifit::ts {

/// Calendar date marking the last day of a 7-day bucket.
class WeekStamp {
public:
    WeekStamp() = default;
    explicit WeekStamp(std::chrono::sys_days day) : day_(day) {}
    WeekStamp(int year, unsigned month, unsigned day);

    /// Parses "YYYY-MM-DD". Throws ParseError on malformed or invalid dates.
    static WeekStamp parse(std::string_view iso);

    std::string iso() const;         // "YYYY-MM-DD"
    std::string month_year() const;  // "MM/YYYY"

    WeekStamp plus_weeks(long w) const { return WeekStamp(day_ + std::chrono::days{7 * w}); }
    long days_until(WeekStamp later) const { return (later.day_ - day_).count(); }

    std::chrono::sys_days day() const { return day_; }
    auto operator<=>(const WeekStamp&) const = default;

private:
    std::chrono::sys_days day_{};
};

/// Absolute month distance, for month-granularity date comparisons.
long month_distance(WeekStamp a, WeekStamp b);

struct WeekPoint {
    WeekStamp stamp;
    double value = 0.0;
};

/// Nonempty weekly series: stamps strictly increasing, spaced exactly 7 days,
/// values >= 0. Validated on construction.
class WeeklySeries {
public:
    explicit WeeklySeries(std::vector<WeekPoint> points);

    std::size_t size() const { return points_.size(); }
    std::span<const WeekPoint> points() const { return points_; }
    const WeekPoint& front() const { return points_.front(); }
    const WeekPoint& back() const { return points_.back(); }
    WeekStamp stamp(std::size_t i) const { return points_[i].stamp; }
    double value(std::size_t i) const { return points_[i].value; }

    std::vector<double> values() const;
    double max_value() const;

private:
    std::vector<WeekPoint> points_;
};

using SegmentSet = std::vector<WeeklySeries>;

/// Parses `date,value` lines (ISO dates, '.' decimals, LF or CRLF). An
/// optional first line whose initial field does not start with a digit is
/// skipped as a header. Rows may arrive unordered; the result is sorted.
WeeklySeries parse_csv(std::string_view text);

/// Canonical CSV: one `YYYY-MM-DD,value` row per week, 12 significant digits.
std::string to_csv(const WeeklySeries& series);

/// Rescales each later segment by (earlier value / later value) at the first
/// shared week stamp, then appends the weeks past the current end. Shared
/// weeks keep the earlier segment's values.
WeeklySeries stitch(const SegmentSet& segments);

/// Multiplies every value with stamp strictly after `cut` by `factor`.
/// `cut` must lie within the series span.
WeeklySeries apply_step_correction(const WeeklySeries& series, WeekStamp cut, double factor);

/// Scales so the maximum maps to 100. With a reference, both conceptually
/// share the factor 100 / max(reference); the returned series is the input
/// under that factor (cross-series comparison).
WeeklySeries normalize(const WeeklySeries& series, const WeeklySeries* reference = nullptr);

}  // namespace epifit::ts
