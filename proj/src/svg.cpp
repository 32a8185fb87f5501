#include "mobgap/svg.hpp"

#include "mobgap/errors.hpp"
#include "mobgap/util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mobgap {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 25;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 70;

std::string px(double v) {
    return format_double_fixed(v, 2);
}

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" "
        << "text-anchor=\"middle\">" << title << "</text>\n";
}

void axis_label_x(std::ostringstream& out, const std::string& label) {
    out << "<text x=\"" << (kMarginLeft + (kWidth - kMarginLeft - kMarginRight) / 2) << "\" y=\""
        << kHeight - 12 << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << label << "</text>\n";
}

void axis_label_y(std::ostringstream& out, const std::string& label) {
    const int x = 18;
    const int y = kMarginTop + (kHeight - kMarginTop - kMarginBottom) / 2;
    out << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"13\" "
        << "text-anchor=\"middle\" transform=\"rotate(-90 " << x << ' ' << y << ")\">" << label
        << "</text>\n";
}

// A readable tick step of the form {1, 2, 5} * 10^n for the given range.
double tick_step(double range, int target_ticks) {
    if (range <= 0.0) {
        return 1.0;
    }
    const double raw = range / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            return mag * mult;
        }
    }
    return mag * 10.0;
}

std::string trim_number(double v) {
    // Fixed with up to 3 decimals, trailing zeros removed.
    std::string s = format_double_fixed(v, 3);
    while (!s.empty() && s.back() == '0') {
        s.pop_back();
    }
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
    }
    return s.empty() ? "0" : s;
}

} // namespace

std::string render_elbow_svg(const DispersionCurve& curve, std::size_t selected_k) {
    if (curve.points.empty()) {
        throw ValidationError("elbow chart needs a non-empty curve");
    }

    double y_max = 0.0;
    for (const auto& p : curve.points) {
        y_max = std::max(y_max, p.average_dispersion);
    }
    if (y_max <= 0.0) {
        y_max = 1.0;
    }
    const double k_min = static_cast<double>(curve.points.front().k);
    const double k_max = static_cast<double>(curve.points.back().k);
    const double k_span = std::max(k_max - k_min, 1.0);

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto x_of = [&](double k) { return kMarginLeft + (k - k_min) / k_span * plot_w; };
    const auto y_of = [&](double d) { return kMarginTop + (1.0 - d / y_max) * plot_h; };

    std::ostringstream out;
    open_svg(out, "Cluster count by average dispersion");

    // Axes.
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // X ticks at every k in the curve.
    for (const auto& p : curve.points) {
        const double x = x_of(static_cast<double>(p.k));
        out << "<line x1=\"" << px(x) << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\"" << px(x)
            << "\" y2=\"" << kHeight - kMarginBottom + 5 << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << kHeight - kMarginBottom + 20
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << p.k
            << "</text>\n";
    }

    // Y ticks.
    const double step = tick_step(y_max, 5);
    for (double v = 0.0; v <= y_max + 1e-9; v += step) {
        const double y = y_of(v);
        out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << px(y) << "\" x2=\"" << kMarginLeft
            << "\" y2=\"" << px(y) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << kMarginLeft - 9 << "\" y=\"" << px(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << trim_number(v)
            << "</text>\n";
    }

    // Dispersion polyline and markers.
    if (curve.points.size() > 1) {
        out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            if (i > 0) {
                out << ' ';
            }
            out << px(x_of(static_cast<double>(curve.points[i].k))) << ','
                << px(y_of(curve.points[i].average_dispersion));
        }
        out << "\"/>\n";
    }
    for (const auto& p : curve.points) {
        const bool selected = p.k == selected_k;
        out << "<circle cx=\"" << px(x_of(static_cast<double>(p.k))) << "\" cy=\""
            << px(y_of(p.average_dispersion)) << "\" r=\"" << (selected ? 6 : 3.5) << "\" fill=\""
            << (selected ? "#d62728" : "#1f77b4") << "\"/>\n";
        if (selected) {
            out << "<text x=\"" << px(x_of(static_cast<double>(p.k))) << "\" y=\""
                << px(y_of(p.average_dispersion) - 12)
                << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                << "fill=\"#d62728\">k=" << p.k << "</text>\n";
        }
    }

    axis_label_x(out, "number of clusters");
    axis_label_y(out, "average dispersion");
    out << "</svg>\n";
    return out.str();
}

std::string render_gap_chart_svg(const GapReport& report, MetricName metric) {
    std::vector<const GapEntry*> entries;
    for (const auto& e : report) {
        if (e.metric == metric) {
            entries.push_back(&e);
        }
    }
    if (entries.empty()) {
        throw ValidationError("no gap entries for metric " + std::string(to_string(metric)));
    }

    double abs_max = 0.0;
    for (const auto* e : entries) {
        if (e->difference.has_value()) {
            abs_max = std::max(abs_max, std::fabs(*e->difference));
        }
    }
    if (abs_max <= 0.0) {
        abs_max = 1.0;
    }

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double y_zero = kMarginTop + plot_h / 2.0;
    const double y_scale = (plot_h / 2.0 - 12.0) / abs_max;
    const double slot = plot_w / static_cast<double>(entries.size());
    const double bar_w = slot * 0.6;

    std::ostringstream out;
    open_svg(out, std::string("Gap in ") + to_string(metric) + " (" + metric_unit(metric) +
                      "), not low-income minus low-income");

    // Zero line and y-axis.
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << px(y_zero) << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << px(y_zero)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    const double step = tick_step(abs_max, 3);
    for (double v = -std::floor(abs_max / step) * step; v <= abs_max + 1e-9; v += step) {
        const double y = y_zero - v * y_scale;
        out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << px(y) << "\" x2=\"" << kMarginLeft
            << "\" y2=\"" << px(y) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << kMarginLeft - 9 << "\" y=\"" << px(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << trim_number(v)
            << "</text>\n";
    }

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const GapEntry& e = *entries[i];
        const double x_center = kMarginLeft + slot * (static_cast<double>(i) + 0.5);
        if (e.difference.has_value()) {
            const double d = *e.difference;
            const double h = std::fabs(d) * y_scale;
            const double y_top = d >= 0.0 ? y_zero - h : y_zero;
            out << "<rect x=\"" << px(x_center - bar_w / 2.0) << "\" y=\"" << px(y_top) << "\" width=\""
                << px(bar_w) << "\" height=\"" << px(h) << "\" fill=\""
                << (d >= 0.0 ? "#1f77b4" : "#ff7f0e") << "\"/>\n";
            // Mirror the source convention: an asterisk marks a difference
            // that is NOT significant at the 5% level.
            if (!e.significant_5pct) {
                const double y_star = d >= 0.0 ? y_top - 6 : y_zero + h + 14;
                out << "<text x=\"" << px(x_center) << "\" y=\"" << px(y_star)
                    << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">*</text>\n";
            }
        } else {
            out << "<text x=\"" << px(x_center) << "\" y=\"" << px(y_zero - 6)
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">n/a</text>\n";
        }
        out << "<text x=\"" << px(x_center) << "\" y=\"" << kHeight - kMarginBottom + 20
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << e.group_label
            << "</text>\n";
    }

    out << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kHeight - 12
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << "* not significant at the 5% level</text>\n";
    axis_label_y(out, std::string("difference (") + metric_unit(metric) + ")");
    out << "</svg>\n";
    return out.str();
}

} // namespace mobgap
