#include "mixfactor/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mixfactor/csv.hpp"

namespace mixfactor {

namespace {

constexpr double kCanvas = 640.0;
constexpr double kMargin = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string color_of(int color_class) {
    return kPalette[static_cast<std::size_t>(color_class) % 8];
}

std::string xml_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Mapper {
    double min_v = 0.0;
    double max_v = 1.0;

    double to_pixel(double v) const {
        return kMargin + (v - min_v) / (max_v - min_v) * (kCanvas - 2.0 * kMargin);
    }
    double to_pixel_y(double v) const {  // SVG y grows downward
        return kCanvas - to_pixel(v);
    }
};

void save(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << content;
}

}  // namespace

std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<PlotPoint>& points,
                        const std::vector<PlotSegment>& segments, bool unit_circle,
                        bool show_labels) {
    double lo = unit_circle ? -1.05 : 0.0;
    double hi = unit_circle ? 1.05 : 0.0;
    for (const auto& p : points) {
        lo = std::min({lo, p.x, p.y});
        hi = std::max({hi, p.x, p.y});
    }
    for (const auto& s : segments) {
        lo = std::min({lo, s.x1, s.y1, s.x2, s.y2});
        hi = std::max({hi, s.x1, s.y1, s.x2, s.y2});
    }
    const double pad = 0.05 * std::max(hi - lo, 1e-9);
    Mapper map{lo - pad, hi + pad};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    svg += "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
           xml_escape(title) + "</text>\n";
    svg += "<text x=\"320\" y=\"628\" text-anchor=\"middle\" font-size=\"12\">" +
           xml_escape(x_label) + "</text>\n";
    svg += "<text x=\"14\" y=\"320\" text-anchor=\"middle\" font-size=\"12\" "
           "transform=\"rotate(-90 14 320)\">" +
           xml_escape(y_label) + "</text>\n";

    // Zero axes when inside the view.
    if (map.min_v < 0.0 && map.max_v > 0.0) {
        const std::string zx = format_double(map.to_pixel(0.0));
        const std::string zy = format_double(map.to_pixel_y(0.0));
        svg += "<line x1=\"" + zx + "\" y1=\"" + format_double(kMargin) + "\" x2=\"" + zx +
               "\" y2=\"" + format_double(kCanvas - kMargin) + "\" stroke=\"#cccccc\"/>\n";
        svg += "<line x1=\"" + format_double(kMargin) + "\" y1=\"" + zy + "\" x2=\"" +
               format_double(kCanvas - kMargin) + "\" y2=\"" + zy +
               "\" stroke=\"#cccccc\"/>\n";
    }
    if (unit_circle) {
        const double r = (kCanvas - 2.0 * kMargin) / (map.max_v - map.min_v);
        svg += "<circle cx=\"" + format_double(map.to_pixel(0.0)) + "\" cy=\"" +
               format_double(map.to_pixel_y(0.0)) + "\" r=\"" + format_double(r) +
               "\" fill=\"none\" stroke=\"#888888\"/>\n";
    }
    for (const auto& s : segments) {
        svg += "<line class=\"seg\" x1=\"" + format_double(map.to_pixel(s.x1)) + "\" y1=\"" +
               format_double(map.to_pixel_y(s.y1)) + "\" x2=\"" +
               format_double(map.to_pixel(s.x2)) + "\" y2=\"" +
               format_double(map.to_pixel_y(s.y2)) + "\" stroke=\"" + color_of(s.color_class) +
               "\" stroke-width=\"0.8\" data-x1=\"" + format_double(s.x1) + "\" data-y1=\"" +
               format_double(s.y1) + "\" data-x2=\"" + format_double(s.x2) + "\" data-y2=\"" +
               format_double(s.y2) + "\"/>\n";
    }
    for (const auto& p : points) {
        svg += "<circle class=\"pt\" cx=\"" + format_double(map.to_pixel(p.x)) + "\" cy=\"" +
               format_double(map.to_pixel_y(p.y)) + "\" r=\"3\" fill=\"" +
               color_of(p.color_class) + "\" data-x=\"" + format_double(p.x) +
               "\" data-y=\"" + format_double(p.y) + "\"/>\n";
        if (show_labels && !p.label.empty()) {
            svg += "<text x=\"" + format_double(map.to_pixel(p.x) + 5.0) + "\" y=\"" +
                   format_double(map.to_pixel_y(p.y) - 5.0) + "\" font-size=\"10\">" +
                   xml_escape(p.label) + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

std::vector<PlotPoint> matrix_points(const Eigen::MatrixXd& coords, PlotAxes axes,
                                     const std::vector<std::string>& labels,
                                     const std::vector<int>& classes = {}) {
    if (axes.x < 0 || axes.y < 0 || axes.x >= coords.cols() || axes.y >= coords.cols()) {
        throw SchemaError("plot axes out of range");
    }
    std::vector<PlotPoint> points;
    points.reserve(static_cast<std::size_t>(coords.rows()));
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        PlotPoint p;
        p.x = coords(i, axes.x);
        p.y = coords(i, axes.y);
        if (i < static_cast<Eigen::Index>(labels.size())) {
            p.label = labels[static_cast<std::size_t>(i)];
        }
        if (i < static_cast<Eigen::Index>(classes.size())) {
            p.color_class = classes[static_cast<std::size_t>(i)];
        }
        points.push_back(std::move(p));
    }
    return points;
}

std::string dim_label(Eigen::Index d) { return "dim" + std::to_string(d + 1); }

std::vector<std::string> observation_labels(const Preprocessed& pre,
                                            const std::vector<std::string>& row_ids) {
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < pre.n_rows; ++i) {
        labels.push_back(i < static_cast<Eigen::Index>(row_ids.size())
                             ? row_ids[static_cast<std::size_t>(i)]
                             : std::to_string(i + 1));
    }
    return labels;
}

std::vector<int> coloring_classes(const Column* color_by, Eigen::Index n) {
    std::vector<int> classes;
    if (color_by != nullptr && color_by->kind == VarKind::Categorical &&
        static_cast<Eigen::Index>(color_by->labels.size()) == n) {
        const auto levels = observed_levels(*color_by);
        for (const auto& label : color_by->labels) {
            const auto it = std::find(levels.begin(), levels.end(), label);
            classes.push_back(static_cast<int>(it - levels.begin()));
        }
    }
    return classes;
}

std::vector<int> kind_classes(const std::vector<VariableInfo>& variables) {
    std::vector<int> classes;
    for (const auto& var : variables) {
        classes.push_back(var.kind == VarKind::Numeric ? 0 : 1);
    }
    return classes;
}

std::vector<std::string> variable_names(const std::vector<VariableInfo>& variables) {
    std::vector<std::string> names;
    for (const auto& var : variables) {
        names.push_back(var.name);
    }
    return names;
}

void emit_core_panels(const Preprocessed& pre, const Eigen::MatrixXd& F,
                      const Eigen::MatrixXd& level_coords, const Eigen::MatrixXd& cor_coords,
                      const Eigen::MatrixXd& sqload, const std::string& out_dir, PlotAxes axes,
                      const Column* color_by, const std::string& suffix) {
    const std::string xl = dim_label(axes.x);
    const std::string yl = dim_label(axes.y);
    const bool label_obs = pre.n_rows <= 50;
    save(out_dir + "/ind_map.svg",
         svg_scatter("Observations" + suffix, xl, yl,
                     matrix_points(F, axes, observation_labels(pre, {}),
                                   coloring_classes(color_by, pre.n_rows)),
                     {}, false, label_obs));
    save(out_dir + "/levels_map.svg",
         svg_scatter("Levels" + suffix, xl, yl, matrix_points(level_coords, axes, pre.level_names)));
    save(out_dir + "/correlation_circle.svg",
         svg_scatter("Numerical variables" + suffix, xl, yl,
                     matrix_points(cor_coords, axes, pre.numeric_names), {}, true));
    save(out_dir + "/sqload_map.svg",
         svg_scatter("Squared loadings" + suffix, xl, yl,
                     matrix_points(sqload, axes, variable_names(pre.variables),
                                   kind_classes(pre.variables))));
}

}  // namespace

void emit_pcamix_plots(const FactorModel& model, const std::string& out_dir, PlotAxes axes,
                       const Column* color_by) {
    emit_core_panels(model.pre, model.F, level_scores(model), correlation_circle(model),
                     model.sqload, out_dir, axes, color_by, "");
}

void emit_pcarot_plots(const RotationResult& result, const std::string& out_dir, PlotAxes axes,
                       const Column* color_by) {
    emit_core_panels(result.pre, result.F_rot, result.A_star_rot.bottomRows(result.pre.n_levels),
                     result.A_star_rot.topRows(result.pre.n_numeric), rotated_sqload(result),
                     out_dir, axes, color_by, " (rotated)");
}

void emit_mfamix_plots(const MfamixModel& model, const std::string& out_dir, PlotAxes axes,
                       const Column* color_by) {
    const Preprocessed& pre = model.pre;
    emit_core_panels(pre, model.F, model.A_star.bottomRows(pre.n_levels),
                     model.A.topRows(pre.n_numeric), model.sqload, out_dir, axes, color_by, "");

    // Partial axes: separate components located by their correlation with
    // the global components.
    std::vector<PlotPoint> axis_points;
    for (std::size_t g = 0; g < model.partial_axes.size(); ++g) {
        const auto& pa = model.partial_axes[g];
        for (Eigen::Index i = 0; i < pa.corr.rows(); ++i) {
            PlotPoint p;
            p.x = pa.corr(i, axes.x);
            p.y = pa.corr(i, axes.y);
            p.label = model.groups.group_names[g] + ":" + dim_label(i);
            p.color_class = static_cast<int>(g);
            axis_points.push_back(std::move(p));
        }
    }
    save(out_dir + "/partial_axes.svg",
         svg_scatter("Partial axes", dim_label(axes.x), dim_label(axes.y), axis_points, {},
                     true));

    save(out_dir + "/groups_map.svg",
         svg_scatter("Groups", dim_label(axes.x), dim_label(axes.y),
                     matrix_points(model.group_contrib, axes, model.groups.group_names)));

    // Star plot: each observation linked to its partial observations; the
    // global score is the barycenter of the star.
    std::vector<PlotPoint> star_points =
        matrix_points(model.F, axes, observation_labels(pre, {}),
                      coloring_classes(color_by, pre.n_rows));
    std::vector<PlotSegment> star_segments;
    for (std::size_t g = 0; g < model.F_partial.size(); ++g) {
        const auto& Fp = model.F_partial[g];
        for (Eigen::Index i = 0; i < Fp.rows(); ++i) {
            PlotSegment s;
            s.x1 = model.F(i, axes.x);
            s.y1 = model.F(i, axes.y);
            s.x2 = Fp(i, axes.x);
            s.y2 = Fp(i, axes.y);
            s.color_class = static_cast<int>(g);
            star_segments.push_back(s);
            PlotPoint p;
            p.x = s.x2;
            p.y = s.y2;
            p.color_class = static_cast<int>(g);
            star_points.push_back(std::move(p));
        }
    }
    save(out_dir + "/partial_ind.svg",
         svg_scatter("Partial observations", dim_label(axes.x), dim_label(axes.y), star_points,
                     star_segments, false, pre.n_rows <= 20));
}

}  // namespace mixfactor
