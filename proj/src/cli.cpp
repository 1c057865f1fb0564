#include "mixfactor/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixfactor/csv.hpp"
#include "mixfactor/mfamix.hpp"
#include "mixfactor/pcarot.hpp"
#include "mixfactor/plots.hpp"
#include "mixfactor/synth.hpp"

namespace mixfactor {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> observation_ids(const MixedTable& table) {
    if (!table.row_ids.empty()) {
        return table.row_ids;
    }
    std::vector<std::string> ids;
    ids.reserve(table.n_rows);
    for (std::size_t i = 0; i < table.n_rows; ++i) {
        ids.push_back(std::to_string(i + 1));
    }
    return ids;
}

std::vector<std::string> dim_labels(Eigen::Index count) {
    std::vector<std::string> labels;
    for (Eigen::Index d = 0; d < count; ++d) {
        labels.push_back("dim" + std::to_string(d + 1));
    }
    return labels;
}

std::vector<std::string> component_labels(Eigen::Index count) {
    std::vector<std::string> labels;
    for (Eigen::Index d = 0; d < count; ++d) {
        labels.push_back("comp" + std::to_string(d + 1));
    }
    return labels;
}

std::vector<std::string> variable_names(const Preprocessed& pre) {
    std::vector<std::string> names;
    for (const auto& var : pre.variables) {
        names.push_back(var.name);
    }
    return names;
}

std::vector<std::string> coefficient_labels(const Preprocessed& pre) {
    std::vector<std::string> labels = {"(intercept)"};
    labels.insert(labels.end(), pre.numeric_names.begin(), pre.numeric_names.end());
    labels.insert(labels.end(), pre.level_names.begin(), pre.level_names.end());
    return labels;
}

// eigenvalue | percent of total inertia | cumulative percent
void write_eigenvalues(const std::string& path, const Eigen::VectorXd& values, double total) {
    Eigen::MatrixXd table(values.size(), 3);
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double pct = 100.0 * values[i] / total;
        cumulative += pct;
        table(i, 0) = values[i];
        table(i, 1) = pct;
        table(i, 2) = cumulative;
    }
    write_matrix_csv(path, "component", component_labels(values.size()),
                     {"eigenvalue", "percent", "cumulative_percent"}, table);
}

void write_scores(const std::string& path, const MixedTable& table, const Eigen::MatrixXd& F) {
    write_matrix_csv(path, "id", observation_ids(table), dim_labels(F.cols()), F);
}

void write_pcamix_outputs(const FactorModel& model, const MixedTable& table,
                          const std::string& dir) {
    const Preprocessed& pre = model.pre;
    write_eigenvalues(dir + "/eigenvalues.csv", model.eigenvalues, model.eigenvalues.sum());
    write_scores(dir + "/ind_coord.csv", table, model.F);
    const auto dims = dim_labels(model.ndim);
    write_matrix_csv(dir + "/levels_coord.csv", "level", pre.level_names, dims,
                     level_scores(model));
    write_matrix_csv(dir + "/quanti_coord.csv", "variable", pre.numeric_names, dims,
                     correlation_circle(model));
    write_matrix_csv(dir + "/sqload.csv", "variable", variable_names(pre), dims, model.sqload);
    write_matrix_csv(dir + "/contrib.csv", "variable", variable_names(pre), dims, model.contrib);
    write_matrix_csv(dir + "/contrib_pct.csv", "variable", variable_names(pre), dims,
                     model.contrib_pct);
    write_matrix_csv(dir + "/coef.csv", "coefficient", coefficient_labels(pre), dims, model.beta);
}

void write_pcarot_outputs(const RotationResult& result, const MixedTable& table,
                          const std::string& dir, double total_inertia) {
    const Preprocessed& pre = result.pre;
    write_eigenvalues(dir + "/eigenvalues.csv", result.lambda_rot, total_inertia);
    write_scores(dir + "/ind_coord.csv", table, result.F_rot);
    const auto dims = dim_labels(result.k);
    write_matrix_csv(dir + "/levels_coord.csv", "level", pre.level_names, dims,
                     result.A_star_rot.bottomRows(pre.n_levels));
    write_matrix_csv(dir + "/quanti_coord.csv", "variable", pre.numeric_names, dims,
                     result.A_star_rot.topRows(pre.n_numeric));
    const Eigen::MatrixXd sqload = rotated_sqload(result);
    Eigen::MatrixXd pct = 100.0 * sqload * result.lambda_rot.cwiseInverse().asDiagonal();
    write_matrix_csv(dir + "/sqload.csv", "variable", variable_names(pre), dims, sqload);
    write_matrix_csv(dir + "/contrib.csv", "variable", variable_names(pre), dims, sqload);
    write_matrix_csv(dir + "/contrib_pct.csv", "variable", variable_names(pre), dims, pct);
    write_matrix_csv(dir + "/coef.csv", "coefficient", coefficient_labels(pre), dims,
                     result.beta_rot);
    write_matrix_csv(dir + "/T.csv", "component", dims, dims, result.T);
}

void write_mfamix_outputs(const MfamixModel& model, const MixedTable& table,
                          const std::string& dir) {
    const Preprocessed& pre = model.pre;
    write_eigenvalues(dir + "/eigenvalues.csv", model.eigenvalues, model.eigenvalues.sum());
    write_scores(dir + "/ind_coord.csv", table, model.F);
    const auto dims = dim_labels(model.ndim);
    write_matrix_csv(dir + "/levels_coord.csv", "level", pre.level_names, dims,
                     model.A_star.bottomRows(pre.n_levels));
    write_matrix_csv(dir + "/quanti_coord.csv", "variable", pre.numeric_names, dims,
                     model.A.topRows(pre.n_numeric));
    write_matrix_csv(dir + "/sqload.csv", "variable", variable_names(pre), dims, model.sqload);
    write_matrix_csv(dir + "/contrib.csv", "variable", variable_names(pre), dims, model.contrib);
    write_matrix_csv(dir + "/contrib_pct.csv", "variable", variable_names(pre), dims,
                     model.contrib_pct);
    write_matrix_csv(dir + "/coef.csv", "coefficient", coefficient_labels(pre), dims, model.beta);
    write_matrix_csv(dir + "/groups_contrib.csv", "group", model.groups.group_names, dims,
                     model.group_contrib);

    const auto ids = observation_ids(table);
    std::vector<std::string> partial_rows;
    Eigen::MatrixXd partial(model.groups.n_groups() * pre.n_rows, model.ndim);
    Eigen::Index row = 0;
    for (int g = 0; g < model.groups.n_groups(); ++g) {
        const auto& name = model.groups.group_names[static_cast<std::size_t>(g)];
        for (Eigen::Index i = 0; i < pre.n_rows; ++i, ++row) {
            partial_rows.push_back(name + ":" + ids[static_cast<std::size_t>(i)]);
            partial.row(row) = model.F_partial[static_cast<std::size_t>(g)].row(i);
        }
    }
    write_matrix_csv(dir + "/partial_ind.csv", "group:id", partial_rows, dims, partial);

    std::vector<std::string> axis_rows;
    Eigen::Index axis_count = 0;
    for (const auto& pa : model.partial_axes) {
        axis_count += pa.corr.rows();
    }
    Eigen::MatrixXd axes(axis_count, model.ndim);
    row = 0;
    for (std::size_t g = 0; g < model.partial_axes.size(); ++g) {
        const auto& pa = model.partial_axes[g];
        for (Eigen::Index i = 0; i < pa.corr.rows(); ++i, ++row) {
            axis_rows.push_back(model.groups.group_names[g] + ":dim" + std::to_string(i + 1));
            axes.row(row) = pa.corr.row(i);
        }
    }
    write_matrix_csv(dir + "/partial_axes.csv", "group:component", axis_rows, dims, axes);

    std::vector<std::string> eig_rows;
    Eigen::Index eig_count = 0;
    for (const auto& sep : model.separate) {
        eig_count += sep.eigenvalues.size();
    }
    Eigen::MatrixXd eig_sep(eig_count, 1);
    row = 0;
    for (std::size_t g = 0; g < model.separate.size(); ++g) {
        const auto& values = model.separate[g].eigenvalues;
        for (Eigen::Index i = 0; i < values.size(); ++i, ++row) {
            eig_rows.push_back(model.groups.group_names[g] + ":comp" + std::to_string(i + 1));
            eig_sep(row, 0) = values[i];
        }
    }
    write_matrix_csv(dir + "/eig_separate.csv", "group:component", eig_rows, {"eigenvalue"},
                     eig_sep);
}

json config_json(const RunConfig& config) {
    json overrides = json::object();
    for (const auto& [name, kind] : config.type_overrides) {
        overrides[name] = kind == VarKind::Numeric ? "num" : "cat";
    }
    return json{{"subcommand", config.subcommand},
                {"data", config.data_path},
                {"groups", config.groups_path},
                {"newdata", config.newdata_path},
                {"ndim", config.ndim},
                {"k", config.k},
                {"out", config.out_dir},
                {"plots", config.plots},
                {"rename_levels", config.rename_levels},
                {"id_col", config.id_col},
                {"type_overrides", overrides}};
}

void write_summary(const std::string& dir, const RunConfig& config, json results) {
    json doc{{"config", config_json(config)},
             {"tolerances", {{"rank_tol", config.rank_tol}, {"angle_tol", config.angle_tol}}},
             {"results", std::move(results)}};
    std::ofstream out(dir + "/summary.json", std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + dir + "/summary.json");
    }
    out << doc.dump(2) << '\n';
}

void run_analysis(const RunConfig& config) {
    const MixedTable table =
        ingest_csv(config.data_path, config.type_overrides, config.id_col);
    fs::create_directories(config.out_dir);

    if (config.subcommand == "pcamix") {
        const FactorModel model =
            fit_pcamix(table, config.ndim, config.rename_levels, config.rank_tol);
        write_pcamix_outputs(model, table, config.out_dir);
        if (config.plots && model.ndim >= 2) {
            emit_pcamix_plots(model, config.out_dir);
        }
        write_summary(config.out_dir, config,
                      json{{"rank", model.decomposition.rank},
                           {"ndim", model.ndim},
                           {"total_inertia", model.pre.total_inertia}});
    } else if (config.subcommand == "pcarot") {
        if (config.k < 2) {
            throw SchemaError("pcarot requires --k of at least 2");
        }
        const FactorModel model =
            fit_pcamix(table, kAllComponents, config.rename_levels, config.rank_tol);
        RotationOptions options;
        options.angle_tol = config.angle_tol;
        const RotationResult result = rotate(model, config.k, options);
        write_pcarot_outputs(result, table, config.out_dir, model.pre.total_inertia);
        if (config.plots) {
            emit_pcarot_plots(result, config.out_dir);
        }
        write_summary(config.out_dir, config,
                      json{{"rank", model.decomposition.rank},
                           {"k", result.k},
                           {"sweeps", result.sweeps},
                           {"converged", result.converged},
                           {"total_inertia", model.pre.total_inertia}});
    } else if (config.subcommand == "mfamix") {
        if (config.groups_path.empty()) {
            throw SchemaError("mfamix requires --groups");
        }
        const GroupMap groups = read_group_map(config.groups_path);
        const MfamixModel model =
            fit_mfamix(table, groups, config.ndim, config.rename_levels, config.rank_tol);
        write_mfamix_outputs(model, table, config.out_dir);
        if (config.plots && model.ndim >= 2) {
            emit_mfamix_plots(model, config.out_dir);
        }
        json lambda1 = json::array();
        for (Eigen::Index g = 0; g < model.groups.lambda1.size(); ++g) {
            lambda1.push_back(model.groups.lambda1[g]);
        }
        write_summary(config.out_dir, config,
                      json{{"rank", model.decomposition.rank},
                           {"ndim", model.ndim},
                           {"n_groups", model.groups.n_groups()},
                           {"group_names", model.groups.group_names},
                           {"lambda1", lambda1}});
    } else if (config.subcommand == "predict") {
        if (!config.groups_path.empty() && config.k >= 2) {
            throw SchemaError("--groups and --k cannot be combined; rotated MFAmix "
                              "components are not supported");
        }
        const std::string newdata_path =
            config.newdata_path.empty() ? config.data_path : config.newdata_path;
        const MixedTable newdata =
            ingest_csv(newdata_path, config.type_overrides, config.id_col);
        Eigen::MatrixXd scores;
        json results;
        if (!config.groups_path.empty()) {
            const GroupMap groups = read_group_map(config.groups_path);
            const MfamixModel model =
                fit_mfamix(table, groups, config.ndim, config.rename_levels, config.rank_tol);
            scores = predict_mfamix(model, newdata);
            results = json{{"model", "mfamix"}, {"rank", model.decomposition.rank}};
        } else if (config.k >= 2) {
            const FactorModel model =
                fit_pcamix(table, kAllComponents, config.rename_levels, config.rank_tol);
            RotationOptions options;
            options.angle_tol = config.angle_tol;
            const RotationResult result = rotate(model, config.k, options);
            scores = predict_rotated(result, newdata);
            results = json{{"model", "pcarot"}, {"k", result.k}, {"sweeps", result.sweeps}};
        } else {
            const FactorModel model =
                fit_pcamix(table, config.ndim, config.rename_levels, config.rank_tol);
            scores = predict_scores(model, newdata);
            results = json{{"model", "pcamix"}, {"rank", model.decomposition.rank}};
        }
        results["newdata_rows"] = newdata.n_rows;
        write_scores(config.out_dir + "/scores.csv", newdata, scores);
        write_summary(config.out_dir, config, std::move(results));
    } else {
        throw SchemaError("unknown subcommand " + config.subcommand);
    }
}

int run_synth(const std::string& spec_path, std::uint64_t seed, bool seed_given,
              const std::string& data_out, const std::string& groups_out) {
    SynthSpec spec;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path, std::ios::binary);
        if (!in) {
            throw IoError("cannot open " + spec_path);
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        spec = parse_synth_spec(buffer.str());
    } else {
        spec = SynthSpec::default_spec();
    }
    if (seed_given) {
        spec.seed = seed;
    }
    const SynthResult result = generate(spec);
    write_mixed_table_csv(data_out, result.table);
    if (!groups_out.empty()) {
        std::ofstream out(groups_out, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + groups_out);
        }
        out << "variable,group\n";
        for (const auto& [var, group] : result.group_map) {
            out << csv_escape(var) << ',' << csv_escape(group) << '\n';
        }
    }
    return 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e) != nullptr) {
        return 1;
    }
    if (dynamic_cast<const SchemaError*>(&e) != nullptr) {
        return 2;
    }
    return 3;
}

const char* class_name(int code) {
    switch (code) {
        case 1: return "io";
        case 2: return "schema";
        default: return "numeric";
    }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_group_map(const std::string& path) {
    const CsvTable csv = read_csv(path);
    if (csv.header.size() != 2) {
        throw SchemaError("groups file must have exactly two columns (variable,group)");
    }
    GroupMap map;
    map.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        if (row[0].empty() || row[1].empty()) {
            throw SchemaError("groups file has an empty field");
        }
        map.emplace_back(row[0], row[1]);
    }
    if (map.empty()) {
        throw SchemaError("groups file lists no variables");
    }
    return map;
}

int run(const RunConfig& config) {
    try {
        run_analysis(config);
        return 0;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        std::cerr << "error (" << class_name(code) << "): " << e.what() << '\n';
        return code;
    }
}

int run_main(const std::vector<std::string>& args) {
    CLI::App app{"PCA, rotation and multiple factor analysis for mixed data"};
    app.require_subcommand(1);

    RunConfig config;
    std::vector<std::string> type_specs;

    auto add_common = [&](CLI::App* cmd, bool needs_data) {
        auto* data = cmd->add_option("--data", config.data_path, "input CSV");
        if (needs_data) {
            data->required();
        }
        cmd->add_option("--ndim", config.ndim, "number of components");
        cmd->add_option("--out", config.out_dir, "output directory");
        cmd->add_flag("--plots", config.plots, "emit SVG plots");
        cmd->add_flag("--rename-level", config.rename_levels,
                      "label levels as variable=level");
        cmd->add_option("--id-col", config.id_col, "column of row identifiers");
        cmd->add_option("--type", type_specs, "force a column kind, COL=num|cat");
        cmd->add_option("--rank-tol", config.rank_tol, "relative rank tolerance");
    };

    auto* pcamix_cmd = app.add_subcommand("pcamix", "PCA of mixed data");
    add_common(pcamix_cmd, true);

    auto* pcarot_cmd = app.add_subcommand("pcarot", "varimax-type rotation of PCAmix");
    add_common(pcarot_cmd, true);
    pcarot_cmd->add_option("--k", config.k, "number of components to rotate")->required();
    pcarot_cmd->add_option("--angle-tol", config.angle_tol, "rotation angle tolerance");

    auto* mfamix_cmd = app.add_subcommand("mfamix", "multiple factor analysis of mixed data");
    add_common(mfamix_cmd, true);
    mfamix_cmd->add_option("--groups", config.groups_path, "variable,group CSV")->required();

    auto* predict_cmd = app.add_subcommand("predict", "score new observations");
    add_common(predict_cmd, true);
    predict_cmd->add_option("--newdata", config.newdata_path,
                            "observations to score (defaults to --data)");
    predict_cmd->add_option("--groups", config.groups_path, "predict through MFAmix");
    predict_cmd->add_option("--k", config.k, "predict through PCArot with k components");
    predict_cmd->add_option("--angle-tol", config.angle_tol, "rotation angle tolerance");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic mixed dataset");
    std::string spec_path;
    std::string synth_out = "data.csv";
    std::string synth_groups;
    std::uint64_t seed = 1;
    synth_cmd->add_option("--spec", spec_path, "JSON spec file");
    synth_cmd->add_option("--out", synth_out, "output data CSV")->required();
    synth_cmd->add_option("--groups", synth_groups, "output groups CSV");
    auto* seed_opt = synth_cmd->add_option("--seed", seed, "generator seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth_cmd->parsed()) {
            return run_synth(spec_path, seed, seed_opt->count() > 0, synth_out, synth_groups);
        }
        for (auto* cmd : {pcamix_cmd, pcarot_cmd, mfamix_cmd, predict_cmd}) {
            if (cmd->parsed()) {
                config.subcommand = cmd->get_name();
            }
        }
        for (const auto& spec : type_specs) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos) {
                throw SchemaError("--type expects COL=num or COL=cat, got " + spec);
            }
            const std::string kind = spec.substr(eq + 1);
            if (kind == "num") {
                config.type_overrides[spec.substr(0, eq)] = VarKind::Numeric;
            } else if (kind == "cat") {
                config.type_overrides[spec.substr(0, eq)] = VarKind::Categorical;
            } else {
                throw SchemaError("--type expects num or cat, got " + kind);
            }
        }
        return run(config);
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        std::cerr << "error (" << class_name(code) << "): " << e.what() << '\n';
        return code;
    }
}

}  // namespace mixfactor
