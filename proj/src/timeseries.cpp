#include "epifit/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace epifit::ts {

namespace {

bool parse_int(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

WeekStamp::WeekStamp(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) throw ParseError("invalid calendar date");
    day_ = std::chrono::sys_days{ymd};
}

WeekStamp WeekStamp::parse(std::string_view iso) {
    iso = trim(iso);
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ParseError("malformed date '" + std::string(iso) + "', expected YYYY-MM-DD");
    int y = 0, m = 0, d = 0;
    if (!parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
        !parse_int(iso.substr(8, 2), d))
        throw ParseError("malformed date '" + std::string(iso) + "', expected YYYY-MM-DD");
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw ParseError("invalid calendar date '" + std::string(iso) + "'");
    return WeekStamp(std::chrono::sys_days{ymd});
}

std::string WeekStamp::iso() const {
    std::chrono::year_month_day ymd{day_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

std::string WeekStamp::month_year() const {
    std::chrono::year_month_day ymd{day_};
    char buf[12];
    std::snprintf(buf, sizeof buf, "%02u/%04d", unsigned(ymd.month()), int(ymd.year()));
    return buf;
}

long month_distance(WeekStamp a, WeekStamp b) {
    std::chrono::year_month_day ya{a.day()}, yb{b.day()};
    long ma = long(int(ya.year())) * 12 + long(unsigned(ya.month()));
    long mb = long(int(yb.year())) * 12 + long(unsigned(yb.month()));
    return ma < mb ? mb - ma : ma - mb;
}

WeeklySeries::WeeklySeries(std::vector<WeekPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw DataError("empty series");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i].value >= 0.0))
            throw DataError("negative value at " + points_[i].stamp.iso());
        if (i > 0) {
            long gap = points_[i - 1].stamp.days_until(points_[i].stamp);
            if (gap == 0) throw DataError("duplicate stamp " + points_[i].stamp.iso());
            if (gap != 7)
                throw DataError("non-uniform spacing: gap of " + std::to_string(gap) +
                                " days before " + points_[i].stamp.iso());
        }
    }
}

std::vector<double> WeeklySeries::values() const {
    std::vector<double> v(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) v[i] = points_[i].value;
    return v;
}

double WeeklySeries::max_value() const {
    double m = points_.front().value;
    for (const auto& p : points_) m = std::max(m, p.value);
    return m;
}

WeeklySeries parse_csv(std::string_view text) {
    std::vector<WeekPoint> rows;
    std::vector<std::size_t> lines;  // original line number per row
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;

        std::size_t comma = line.find(',');
        if (comma == std::string_view::npos)
            throw ParseError("expected 'date,value'", line_no);
        std::string_view date_field = trim(line.substr(0, comma));
        std::string_view value_field = trim(line.substr(comma + 1));

        if (rows.empty() && line_no == 1 && !date_field.empty() &&
            !(date_field[0] >= '0' && date_field[0] <= '9'))
            continue;  // header

        WeekStamp stamp;
        try {
            stamp = WeekStamp::parse(date_field);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(value_field.data(), value_field.data() + value_field.size(), value);
        if (ec != std::errc{} || ptr != value_field.data() + value_field.size() || !std::isfinite(value))
            throw ParseError("malformed value '" + std::string(value_field) + "'", line_no);
        if (value < 0.0)
            throw ParseError("negative value " + std::string(value_field), line_no);
        rows.push_back({stamp, value});
        lines.push_back(line_no);
    }
    if (rows.empty()) throw ParseError("empty series: no data rows");

    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].stamp < rows[b].stamp; });

    std::vector<WeekPoint> sorted(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = rows[order[i]];
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        long gap = sorted[i - 1].stamp.days_until(sorted[i].stamp);
        if (gap == 0)
            throw ParseError("duplicate stamp " + sorted[i].stamp.iso(), lines[order[i]]);
        if (gap != 7)
            throw ParseError("gap of " + std::to_string(gap) + " days before " +
                                 sorted[i].stamp.iso() + ", expected 7",
                             lines[order[i]]);
    }
    return WeeklySeries(std::move(sorted));
}

std::string to_csv(const WeeklySeries& series) {
    std::string out;
    out.reserve(series.size() * 28);
    char buf[40];
    for (const auto& p : series.points()) {
        std::snprintf(buf, sizeof buf, "%.12g", p.value);
        out += p.stamp.iso();
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

WeeklySeries stitch(const SegmentSet& segments) {
    if (segments.empty()) throw DataError("no segments to stitch");
    std::vector<WeekPoint> acc(segments[0].points().begin(), segments[0].points().end());

    for (std::size_t s = 1; s < segments.size(); ++s) {
        const WeeklySeries& seg = segments[s];
        // first stamp present in both the accumulated series and this segment
        std::size_t anchor = seg.size();
        for (std::size_t i = 0; i < seg.size(); ++i) {
            long off = acc.front().stamp.days_until(seg.stamp(i));
            if (off >= 0 && off % 7 == 0 && std::size_t(off / 7) < acc.size()) {
                anchor = i;
                break;
            }
        }
        if (anchor == seg.size())
            throw DataError("segments " + std::to_string(s) + " and " + std::to_string(s + 1) +
                            " share no week stamp");
        double later_val = seg.value(anchor);
        if (later_val == 0.0)
            throw DataError("zero value at overlap stamp " + seg.stamp(anchor).iso() +
                            " in segment " + std::to_string(s + 1));
        std::size_t acc_idx = std::size_t(acc.front().stamp.days_until(seg.stamp(anchor)) / 7);
        double factor = acc[acc_idx].value / later_val;

        for (std::size_t i = anchor; i < seg.size(); ++i) {
            if (seg.stamp(i) > acc.back().stamp)
                acc.push_back({seg.stamp(i), seg.value(i) * factor});
        }
    }
    return WeeklySeries(std::move(acc));
}

WeeklySeries apply_step_correction(const WeeklySeries& series, WeekStamp cut, double factor) {
    if (!(factor > 0.0)) throw DataError("step correction factor must be > 0");
    if (cut < series.front().stamp || cut > series.back().stamp)
        throw DataError("cut date " + cut.iso() + " outside series span " +
                        series.front().stamp.iso() + ".." + series.back().stamp.iso());
    std::vector<WeekPoint> out(series.points().begin(), series.points().end());
    for (auto& p : out)
        if (p.stamp > cut) p.value *= factor;
    return WeeklySeries(std::move(out));
}

WeeklySeries normalize(const WeeklySeries& series, const WeeklySeries* reference) {
    double peak = reference ? reference->max_value() : series.max_value();
    if (!(peak > 0.0))
        throw DataError(reference ? "all-zero reference series" : "all-zero series");
    std::vector<WeekPoint> out(series.points().begin(), series.points().end());
    // v / peak * 100 maps the peak element to exactly 100
    for (auto& p : out) p.value = p.value / peak * 100.0;
    return WeeklySeries(std::move(out));
}

}  // namespace epifit::ts
