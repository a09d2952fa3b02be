#pragma once

#include <string>
#include <vector>

#include "nsbf/experiment.hpp"

namespace nsbf {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotData {
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// One curve of mean achieved_q per (setting, N); fig4 rows add a dashed
/// curve of the mean relaxation bound for each of them.
PlotData plot_data(const std::vector<ExperimentRow>& rows);

std::string render_svg(const PlotData& data);

/// Reads an experiment CSV and writes the chart. Throws nsbf::Error for an
/// empty CSV or missing columns, in which case nothing is written.
void emit_plot(const std::string& csv_path, const std::string& svg_path);

}  // namespace nsbf
