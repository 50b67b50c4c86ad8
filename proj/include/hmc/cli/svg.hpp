// Static SVG charts. Output depends only on the input numbers: coordinates
// are printed with fixed precision and no timestamps or ids are emitted.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "hmc/csv.hpp"

namespace hmc::svg {

enum class Style { line, dashed, circles, crosses };

struct Series {
    std::string label;
    std::vector<double> x, y;  // non-finite points are skipped
    std::string color = "#1f4e9c";
    Style style = Style::line;
};

/// Per-time band between a lower and upper quantile around a mean line.
struct FanChart {
    std::string title, x_label = "step", y_label = "value";
    std::vector<double> x, lower, upper, mean;
    std::string band_label = "quantile band";
    std::vector<Series> overlays;
};

struct ScatterChart {
    std::string title, x_label, y_label;
    std::vector<Series> series;
};

namespace detail {

constexpr double width = 720, height = 440;
constexpr double left = 80, right = 170, top = 40, bottom = 60;
constexpr double plot_w = width - left - right, plot_h = height - top - bottom;

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf) == "-0.00" ? "0.00" : buf;
}

inline std::string label_number(double v) {
    if (std::abs(v) < 1e-12) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void add(const std::vector<double>& v) {
        for (double x : v) add(x);
    }
    /// Empty ranges become [0, 1]; zero-width ones are widened symmetrically.
    void settle(double pad_fraction) {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
            return;
        }
        const double span = hi - lo;
        const double pad = span > 0.0 ? pad_fraction * span : std::max(std::abs(lo) * 0.05, 0.5);
        lo -= pad;
        hi += pad;
    }
};

/// Tick positions at 1, 2 or 5 times a power of ten, roughly `target` of them.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) ticks.push_back(v);
    return ticks;
}

class Canvas {
public:
    Canvas(Range xr, Range yr) : x_(xr), y_(yr) {}

    [[nodiscard]] double px(double x) const { return left + (x - x_.lo) / (x_.hi - x_.lo) * plot_w; }
    [[nodiscard]] double py(double y) const { return top + (y_.hi - y) / (y_.hi - y_.lo) * plot_h; }

    void open(const std::string& title) {
        out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
                "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out_ += "<text x=\"" + fmt(left + plot_w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
                escape(title) + "</text>\n";
    }

    void axes(const std::string& xl, const std::vector<double>& xticks, const std::string& yl) {
        out_ += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
        out_ += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(plot_w) + "\" height=\"" +
                fmt(plot_h) + "\"/>\n</g>\n";
        for (double t : xticks) {
            const double x = px(t);
            out_ += "<g class=\"xtick\"><line x1=\"" + fmt(x) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" + fmt(x) +
                    "\" y2=\"" + fmt(top + plot_h + 5) + "\" stroke=\"black\"/><text x=\"" + fmt(x) + "\" y=\"" +
                    fmt(top + plot_h + 18) + "\" text-anchor=\"middle\">" + label_number(t) + "</text></g>\n";
        }
        for (double t : nice_ticks(y_.lo, y_.hi)) {
            const double y = py(t);
            out_ += "<g class=\"ytick\"><line x1=\"" + fmt(left - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(left) +
                    "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/><line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y) +
                    "\" x2=\"" + fmt(left + plot_w) + "\" y2=\"" + fmt(y) +
                    "\" stroke=\"#dddddd\"/><text x=\"" + fmt(left - 8) + "\" y=\"" + fmt(y + 4) +
                    "\" text-anchor=\"end\">" + label_number(t) + "</text></g>\n";
        }
        out_ += "<text x=\"" + fmt(left + plot_w / 2) + "\" y=\"" + fmt(height - 15) + "\" text-anchor=\"middle\">" +
                escape(xl) + "</text>\n";
        out_ += "<text x=\"18\" y=\"" + fmt(top + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
                fmt(top + plot_h / 2) + ")\">" + escape(yl) + "</text>\n";
    }

    void band(const std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi) {
        std::string pts;
        for (std::size_t i = 0; i < x.size(); ++i) pts += fmt(px(x[i])) + "," + fmt(py(hi[i])) + " ";
        for (std::size_t i = x.size(); i-- > 0;) pts += fmt(px(x[i])) + "," + fmt(py(lo[i])) + " ";
        if (!pts.empty()) pts.pop_back();
        out_ += "<polygon class=\"band\" points=\"" + pts + "\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"#6baed6\"/>\n";
    }

    void series(const Series& s) {
        const std::string cls = "series";
        if (s.style == Style::line || s.style == Style::dashed) {
            // break the polyline at missing points
            std::string pts;
            auto flush = [&] {
                if (pts.empty()) return;
                pts.pop_back();
                out_ += "<polyline class=\"" + cls + "\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
                        "\" stroke-width=\"2\"" + (s.style == Style::dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
                pts.clear();
            };
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    flush();
                    continue;
                }
                pts += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
            }
            flush();
            return;
        }
        out_ += "<g class=\"" + cls + "\" stroke=\"" + s.color + "\" fill=\"none\">\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            const double x = px(s.x[i]), y = py(s.y[i]);
            if (s.style == Style::circles) {
                out_ += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"3\"/>\n";
            } else {
                out_ += "<path d=\"M" + fmt(x - 3) + " " + fmt(y - 3) + "L" + fmt(x + 3) + " " + fmt(y + 3) + "M" +
                        fmt(x - 3) + " " + fmt(y + 3) + "L" + fmt(x + 3) + " " + fmt(y - 3) + "\"/>\n";
            }
        }
        out_ += "</g>\n";
    }

    void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
        double y = top + 10;
        for (const auto& [label, color] : entries) {
            const double x = left + plot_w + 15;
            out_ += "<g class=\"legend\"><rect x=\"" + fmt(x) + "\" y=\"" + fmt(y - 8) +
                    "\" width=\"14\" height=\"10\" fill=\"" + color + "\"/><text x=\"" + fmt(x + 20) + "\" y=\"" +
                    fmt(y + 1) + "\">" + escape(label) + "</text></g>\n";
            y += 18;
        }
    }

    [[nodiscard]] std::string close() {
        out_ += "</svg>\n";
        return std::move(out_);
    }

private:
    Range x_, y_;
    std::string out_;
};

}  // namespace detail

[[nodiscard]] inline std::string render(const FanChart& c) {
    const std::size_t n = c.x.size();
    if (n == 0) throw DimensionError("time", "fan chart: empty table");
    if (c.lower.size() != n || c.upper.size() != n || c.mean.size() != n)
        throw DimensionError("time", "fan chart: band, mean and time axis lengths differ");
    detail::Range xr, yr;
    xr.add(c.x);
    yr.add(c.lower);
    yr.add(c.upper);
    yr.add(c.mean);
    for (const auto& s : c.overlays) yr.add(s.y);
    if (xr.hi == xr.lo) xr.settle(0.0);
    yr.settle(0.05);

    std::vector<double> xticks;
    if (n <= 12) {
        xticks = c.x;
    } else {
        for (double t : detail::nice_ticks(xr.lo, xr.hi))
            if (t == std::floor(t)) xticks.push_back(t);
    }
    detail::Canvas cv(xr, yr);
    cv.open(c.title);
    cv.axes(c.x_label, xticks, c.y_label);
    cv.band(c.x, c.lower, c.upper);
    cv.series(Series{"mean", c.x, c.mean, "#08306b", Style::line});
    std::vector<std::pair<std::string, std::string>> legend{{c.band_label, "#9ecae1"}, {"mean", "#08306b"}};
    for (const auto& s : c.overlays) {
        cv.series(s);
        legend.emplace_back(s.label, s.color);
    }
    cv.legend(legend);
    return cv.close();
}

[[nodiscard]] inline std::string render(const ScatterChart& c) {
    detail::Range xr, yr;
    for (const auto& s : c.series) {
        if (s.x.size() != s.y.size()) throw DimensionError("points", "scatter chart: x and y lengths differ");
        xr.add(s.x);
        yr.add(s.y);
    }
    xr.settle(0.05);
    yr.settle(0.05);
    detail::Canvas cv(xr, yr);
    cv.open(c.title);
    cv.axes(c.x_label, detail::nice_ticks(xr.lo, xr.hi), c.y_label);
    std::vector<std::pair<std::string, std::string>> legend;
    for (const auto& s : c.series) {
        cv.series(s);
        legend.emplace_back(s.label, s.color);
    }
    cv.legend(legend);
    return cv.close();
}

template <class Chart>
void write(const Chart& chart, const std::filesystem::path& file) {
    auto os = csv::open_output(file);
    os << render(chart);
    if (!os) throw IoError("failed writing " + file.string());
}

}  // namespace hmc::svg
