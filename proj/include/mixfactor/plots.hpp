#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixfactor/mfamix.hpp"
#include "mixfactor/pcarot.hpp"

namespace mixfactor {

/// Pair of component indices (0-based) to plot.
struct PlotAxes {
    Eigen::Index x = 0;
    Eigen::Index y = 1;
};

/// A scatter point carried into the SVG with both pixel and data
/// coordinates; tests compare the data-* attributes structurally.
struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
    int color_class = 0;
};

struct PlotSegment {
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
    int color_class = 0;
};

/// Minimal SVG scatter with centered axes; unit_circle draws the radius-1
/// circle used by correlation plots.
std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<PlotPoint>& points,
                        const std::vector<PlotSegment>& segments = {},
                        bool unit_circle = false, bool show_labels = true);

/// Component map, level map, correlation circle and squared-loadings map.
/// `color_by` optionally colors the observation map by a categorical
/// variable of the training table.
void emit_pcamix_plots(const FactorModel& model, const std::string& out_dir,
                       PlotAxes axes = {}, const Column* color_by = nullptr);

void emit_pcarot_plots(const RotationResult& result, const std::string& out_dir,
                       PlotAxes axes = {}, const Column* color_by = nullptr);

/// PCAmix-style panels plus the partial-axes map, the group-contribution
/// map and the partial-observation star plot.
void emit_mfamix_plots(const MfamixModel& model, const std::string& out_dir,
                       PlotAxes axes = {}, const Column* color_by = nullptr);

}  // namespace mixfactor
