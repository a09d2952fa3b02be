#include "nsbf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nsbf {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Tick spacing of 1, 2 or 5 times a power of ten giving about five ticks.
double tick_step(double span)
{
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += ch;
        }
    }
    return out;
}

}  // namespace

PlotData plot_data(const std::vector<ExperimentRow>& rows)
{
    if (rows.empty()) {
        throw Error("plot: no data rows");
    }
    PlotData data;
    data.x_label = rows.front().preset == "fig6" ? "source 1 power (dBW)" : "total power (dBW)";
    data.y_label = "min achievable secrecy rate (bits/channel use)";
    const bool with_bound = rows.front().preset == "fig4";
    const std::vector<SummaryRow> summary = summarize(rows);

    auto series_for = [&data](const std::string& label, bool dashed) -> PlotSeries& {
        for (PlotSeries& s : data.series) {
            if (s.label == label) {
                return s;
            }
        }
        data.series.push_back({label, {}, {}, dashed});
        return data.series.back();
    };
    for (const SummaryRow& s : summary) {
        if (s.count == 0) {
            continue;
        }
        std::string base = "N=" + std::to_string(s.n);
        if (s.series != "unit") {
            base += " " + s.series;
        }
        PlotSeries& q = series_for(base, false);
        q.x.push_back(s.sweep_value);
        q.y.push_back(s.mean_achieved_q);
        if (with_bound) {
            PlotSeries& b = series_for(base + " SDR bound", true);
            b.x.push_back(s.sweep_value);
            b.y.push_back(s.mean_sdr_bound);
        }
    }
    if (data.series.empty()) {
        throw Error("plot: every row failed");
    }
    return data;
}

std::string render_svg(const PlotData& data)
{
    double x_min = INFINITY, x_max = -INFINITY, y_max = 0.0;
    for (const PlotSeries& s : data.series) {
        for (double x : s.x) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
        }
        for (double y : s.y) {
            y_max = std::max(y_max, y);
        }
    }
    if (!(x_max > x_min)) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (!(y_max > 0.0)) {
        y_max = 1.0;
    }
    const double y_step = tick_step(y_max);
    y_max = std::ceil(y_max / y_step) * y_step;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return kTop + ph - y / y_max * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double x_step = tick_step(x_max - x_min);
    for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9 * x_step; x += x_step) {
        os << "<line x1=\"" << px(x) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(x)
           << "\" y2=\"" << kTop << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << px(x) << "\" y=\"" << kTop + ph + 18
           << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
    }
    for (double y = 0.0; y <= y_max + 1e-9 * y_step; y += y_step) {
        os << "<line x1=\"" << kLeft << "\" y1=\"" << py(y) << "\" x2=\"" << kLeft + pw
           << "\" y2=\"" << py(y) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(y) + 4
           << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
       << "\" text-anchor=\"middle\">" << escape(data.x_label) << "</text>\n";
    os << "<text transform=\"translate(20," << kTop + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(data.y_label) << "</text>\n";

    for (std::size_t i = 0; i < data.series.size(); ++i) {
        const PlotSeries& s = data.series[i];
        const char* color = kColors[(s.dashed ? i - 1 : i) % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
        if (s.dashed) {
            os << " stroke-dasharray=\"6,4\"";
        }
        os << " points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            os << (k ? " " : "") << px(s.x[k]) << "," << py(s.y[k]);
        }
        os << "\"/>\n";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            os << "<circle cx=\"" << px(s.x[k]) << "\" cy=\"" << py(s.y[k])
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
        const double lx = kLeft + pw + 15;
        os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\""
           << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\""
           << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        os << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plot(const std::string& csv_path, const std::string& svg_path)
{
    std::ifstream in(csv_path);
    if (!in) {
        throw Error("cannot open " + csv_path);
    }
    const std::string svg = render_svg(plot_data(read_csv(in)));
    std::ofstream out(svg_path);
    if (!out) {
        throw Error("cannot write " + svg_path);
    }
    out << svg;
}

}  // namespace nsbf
