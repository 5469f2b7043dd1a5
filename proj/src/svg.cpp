#include "epifit/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "epifit/errors.hpp"

namespace epifit::svg {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string num(double v) { return fmt("%.2f", v); }

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Largest {1,2,5}*10^k step that yields at least 4 intervals.
double nice_step(double span) {
    double raw = span / 4.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {5.0, 2.0, 1.0})
        if (m * mag <= raw) return m * mag;
    return mag;
}

}  // namespace

std::string render(const ChartSpec& spec) {
    if (spec.series.empty()) throw Error("svg: chart needs at least one series");

    double xmin = 0.0, xmax = 0.0, ymax = 0.0;
    bool first = true;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size()) throw Error("svg: series x/y length mismatch");
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (first) {
                xmin = xmax = s.x[k];
                first = false;
            } else {
                xmin = std::min(xmin, s.x[k]);
                xmax = std::max(xmax, s.x[k]);
            }
            ymax = std::max(ymax, s.y[k]);
        }
    }
    if (first) throw Error("svg: all series are empty");
    if (spec.hline) ymax = std::max(ymax, *spec.hline);
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;

    const double ml = 64, mr = 16, mt = 40, mb = 48;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - y / ymax * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
           std::to_string(spec.width) + " " + std::to_string(spec.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(spec.width / 2.0) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           escape(spec.title) + "</text>\n";

    // Horizontal grid and y tick labels.
    double ystep = nice_step(ymax);
    for (double v = 0.0; v <= ymax + 1e-9 * ystep; v += ystep) {
        double yy = py(v);
        out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(yy) + "\" x2=\"" + num(ml + pw) +
               "\" y2=\"" + num(yy) + "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(yy + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt("%g", v) + "</text>\n";
    }

    // X ticks at year boundaries inside the span; week ticks when the span
    // stays within one calendar year.
    using namespace std::chrono;
    year_month_day first_day(spec.t0.plus_weeks(static_cast<long>(std::floor(xmin))).day());
    year_month_day last_day(spec.t0.plus_weeks(static_cast<long>(std::ceil(xmax))).day());
    int tick_count = 0;
    for (int y = static_cast<int>(first_day.year()) + 1; y <= static_cast<int>(last_day.year());
         ++y) {
        sys_days jan1{January / 1 / year{y}};
        double wk = static_cast<double>((jan1 - spec.t0.day()).count()) / 7.0;
        if (wk < xmin || wk > xmax) continue;
        double xx = px(wk);
        out += "<line x1=\"" + num(xx) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(xx) +
               "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(xx) + "\" y=\"" + num(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               std::to_string(y) + "</text>\n";
        ++tick_count;
    }
    if (tick_count == 0) {
        double step = std::max(1.0, std::ceil((xmax - xmin) / 6.0));
        for (double wk = std::ceil(xmin); wk <= xmax; wk += step) {
            double xx = px(wk);
            out += "<line x1=\"" + num(xx) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(xx) +
                   "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
            out += "<text x=\"" + num(xx) + "\" y=\"" + num(mt + ph + 18) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">w" +
                   fmt("%g", wk) + "</text>\n";
        }
    }

    if (spec.hline) {
        double yy = py(*spec.hline);
        out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(yy) + "\" x2=\"" + num(ml + pw) +
               "\" y2=\"" + num(yy) + "\" stroke=\"#888888\" stroke-dasharray=\"2 3\"/>\n";
    }

    for (const auto& s : spec.series) {
        if (s.points) {
            for (std::size_t k = 0; k < s.x.size(); ++k)
                out += "<circle cx=\"" + num(px(s.x[k])) + "\" cy=\"" + num(py(s.y[k])) +
                       "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
        } else if (!s.x.empty()) {
            out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
            if (s.dashed) out += " stroke-dasharray=\"6 4\"";
            out += " points=\"";
            for (std::size_t k = 0; k < s.x.size(); ++k) {
                if (k) out += " ";
                out += num(px(s.x[k])) + "," + num(py(s.y[k]));
            }
            out += "\"/>\n";
        }
    }

    // Axes on top of the grid.
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
           num(mt + ph) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(ml + pw) +
           "\" y2=\"" + num(mt + ph) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"14\" y=\"" + num(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 " +
           num(mt + ph / 2) + ")\">" + escape(spec.y_label) + "</text>\n";

    // Legend rows in the top-left corner of the plot area.
    double ly = mt + 14;
    for (const auto& s : spec.series) {
        if (s.label.empty()) continue;
        if (s.points) {
            out += "<circle cx=\"" + num(ml + 18) + "\" cy=\"" + num(ly - 4) + "\" r=\"2\" fill=\"" +
                   s.color + "\"/>\n";
        } else {
            out += "<line x1=\"" + num(ml + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
                   num(ml + 30) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.5\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") +
                   "/>\n";
        }
        out += "<text x=\"" + num(ml + 36) + "\" y=\"" + num(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(s.label) + "</text>\n";
        ly += 16;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace epifit::svg
