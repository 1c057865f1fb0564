#include "mixfactor/preprocess.hpp"

#include <cmath>
#include <unordered_map>

namespace mixfactor {

std::vector<std::vector<Eigen::Index>> Preprocessed::var_index() const {
    std::vector<std::vector<Eigen::Index>> index;
    index.reserve(variables.size());
    for (const auto& var : variables) {
        index.push_back(var.z_cols);
    }
    return index;
}

std::pair<MixedTable, MixedTable> splitmix(const MixedTable& table) {
    MixedTable numeric;
    MixedTable categorical;
    numeric.n_rows = categorical.n_rows = table.n_rows;
    numeric.row_ids = categorical.row_ids = table.row_ids;
    for (const auto& col : table.columns) {
        (col.kind == VarKind::Numeric ? numeric : categorical).columns.push_back(col);
    }
    return {std::move(numeric), std::move(categorical)};
}

StandardizeResult standardize(const Eigen::MatrixXd& X1, const std::vector<std::string>& names) {
    const Eigen::Index n = X1.rows();
    const Eigen::Index p1 = X1.cols();
    if (n == 0) {
        throw SchemaError("standardize: empty input");
    }
    StandardizeResult out;
    out.Z1.resize(n, p1);
    out.means.resize(p1);
    out.sds.resize(p1);
    for (Eigen::Index j = 0; j < p1; ++j) {
        const double mean = X1.col(j).mean();
        const double var = (X1.col(j).array() - mean).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (!(sd > 0.0)) {
            const std::string name =
                j < static_cast<Eigen::Index>(names.size()) ? names[j] : std::to_string(j);
            throw SchemaError("zero variance in numeric column " + name);
        }
        out.means[j] = mean;
        out.sds[j] = sd;
        out.Z1.col(j) = (X1.col(j).array() - mean) / sd;
    }
    return out;
}

IndicatorResult indicator(const std::vector<Column>& categoricals, std::size_t n_rows,
                          bool rename_levels) {
    IndicatorResult out;
    out.levels_per_var.reserve(categoricals.size());
    out.level_of_row.reserve(categoricals.size());

    Eigen::Index m = 0;
    for (const auto& col : categoricals) {
        auto levels = observed_levels(col);
        std::unordered_map<std::string, std::int32_t> level_index;
        for (std::size_t s = 0; s < levels.size(); ++s) {
            level_index.emplace(levels[s], static_cast<std::int32_t>(s));
        }
        std::vector<std::int32_t> assignment(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) {
            assignment[i] = level_index.at(col.labels[i]);
        }
        for (const auto& level : levels) {
            out.level_names.push_back(rename_levels ? col.name + "=" + level : level);
        }
        m += static_cast<Eigen::Index>(levels.size());
        out.levels_per_var.push_back(std::move(levels));
        out.level_of_row.push_back(std::move(assignment));
    }

    out.G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_rows), m);
    out.level_counts = Eigen::VectorXd::Zero(m);
    Eigen::Index offset = 0;
    for (std::size_t j = 0; j < categoricals.size(); ++j) {
        for (std::size_t i = 0; i < n_rows; ++i) {
            const Eigen::Index s = offset + out.level_of_row[j][i];
            out.G(static_cast<Eigen::Index>(i), s) = 1.0;
            out.level_counts[s] += 1.0;
        }
        offset += static_cast<Eigen::Index>(out.levels_per_var[j].size());
    }
    return out;
}

Preprocessed build_preprocessed(const MixedTable& table, bool rename_levels) {
    table.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(table.n_rows);
    if (n < 2) {
        throw SchemaError("at least 2 observations are required");
    }
    if (table.columns.empty()) {
        throw SchemaError("table has no variables");
    }

    std::vector<const Column*> numeric_cols;
    std::vector<Column> categorical_cols;
    for (const auto& col : table.columns) {
        if (col.kind == VarKind::Numeric) {
            numeric_cols.push_back(&col);
        } else {
            categorical_cols.push_back(col);
        }
    }
    const Eigen::Index p1 = static_cast<Eigen::Index>(numeric_cols.size());
    const Eigen::Index p2 = static_cast<Eigen::Index>(categorical_cols.size());

    Eigen::MatrixXd X1(n, p1);
    std::vector<std::string> numeric_names;
    for (Eigen::Index j = 0; j < p1; ++j) {
        X1.col(j) = Eigen::Map<const Eigen::VectorXd>(numeric_cols[j]->values.data(), n);
        numeric_names.push_back(numeric_cols[j]->name);
    }
    auto std_res = standardize(X1, numeric_names);
    auto ind_res = indicator(categorical_cols, table.n_rows, rename_levels);
    const Eigen::Index m = ind_res.G.cols();

    Preprocessed pre{
        .Z = Eigen::MatrixXd(n, p1 + m),
        .N = DiagMetric::uniform(n, 1.0 / static_cast<double>(n)),
        .M = DiagMetric(Eigen::VectorXd::Ones(p1 + m)),
        .col_means = std::move(std_res.means),
        .col_sds = std::move(std_res.sds),
        .level_counts = ind_res.level_counts,
        .numeric_names = std::move(numeric_names),
        .level_names = std::move(ind_res.level_names),
        .variables = {},
        .n_rows = n,
        .n_numeric = p1,
        .n_categorical = p2,
        .n_levels = m,
        .total_inertia = static_cast<double>(p1 + m - p2),
    };
    pre.Z.leftCols(p1) = std_res.Z1;
    // Z2: indicator centered by the level frequencies n_s / n.
    pre.Z.rightCols(m) =
        ind_res.G.rowwise() - (ind_res.level_counts / static_cast<double>(n)).transpose();
    pre.M.weights.tail(m) = (static_cast<double>(n) / ind_res.level_counts.array()).matrix();

    // Variable bookkeeping in input order.
    Eigen::Index numeric_seen = 0;
    Eigen::Index level_offset = p1;
    std::size_t cat_seen = 0;
    for (const auto& col : table.columns) {
        VariableInfo info;
        info.name = col.name;
        info.kind = col.kind;
        if (col.kind == VarKind::Numeric) {
            info.z_cols = {numeric_seen++};
        } else {
            const auto& levels = ind_res.levels_per_var[cat_seen];
            for (std::size_t s = 0; s < levels.size(); ++s) {
                info.z_cols.push_back(level_offset + static_cast<Eigen::Index>(s));
            }
            info.levels = levels;
            info.level_of_row = ind_res.level_of_row[cat_seen];
            level_offset += static_cast<Eigen::Index>(levels.size());
            ++cat_seen;
        }
        pre.variables.push_back(std::move(info));
    }
    return pre;
}

namespace {

// Matches new-table columns to the fitted variables by name and checks
// kinds; returns pointers in fitted-variable order.
std::vector<const Column*> match_columns(const MixedTable& new_table,
                                         const Preprocessed& fitted) {
    std::unordered_map<std::string, const Column*> by_name;
    for (const auto& col : new_table.columns) {
        if (!by_name.emplace(col.name, &col).second) {
            throw SchemaError("duplicate column " + col.name);
        }
    }
    std::vector<const Column*> matched;
    matched.reserve(fitted.variables.size());
    for (const auto& var : fitted.variables) {
        auto it = by_name.find(var.name);
        if (it == by_name.end()) {
            throw SchemaError("missing column " + var.name);
        }
        if (it->second->kind != var.kind) {
            throw SchemaError("column " + var.name + " changed kind");
        }
        matched.push_back(it->second);
        by_name.erase(it);
    }
    if (!by_name.empty()) {
        throw SchemaError("unexpected extra column " + by_name.begin()->first);
    }
    return matched;
}

}  // namespace

Eigen::MatrixXd raw_design(const MixedTable& new_table, const Preprocessed& fitted) {
    const auto matched = match_columns(new_table, fitted);
    const Eigen::Index n_new = static_cast<Eigen::Index>(new_table.n_rows);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n_new, fitted.n_zcols());

    for (std::size_t j = 0; j < fitted.variables.size(); ++j) {
        const auto& var = fitted.variables[j];
        const Column& col = *matched[j];
        if (var.kind == VarKind::Numeric) {
            for (Eigen::Index i = 0; i < n_new; ++i) {
                const double v = col.values[static_cast<std::size_t>(i)];
                if (!std::isfinite(v)) {
                    throw NumericError("non-finite value in column " + var.name);
                }
                X(i, var.z_cols[0]) = v;
            }
        } else {
            std::unordered_map<std::string, Eigen::Index> level_col;
            for (std::size_t s = 0; s < var.levels.size(); ++s) {
                level_col.emplace(var.levels[s], var.z_cols[s]);
            }
            for (Eigen::Index i = 0; i < n_new; ++i) {
                const auto& label = col.labels[static_cast<std::size_t>(i)];
                auto it = level_col.find(label);
                if (it == level_col.end()) {
                    throw SchemaError("unknown level " + label + " for variable " + var.name);
                }
                X(i, it->second) = 1.0;
            }
        }
    }
    return X;
}

Eigen::MatrixXd apply_preprocess(const MixedTable& new_table, const Preprocessed& fitted) {
    Eigen::MatrixXd Z = raw_design(new_table, fitted);
    const Eigen::Index p1 = fitted.n_numeric;
    for (Eigen::Index j = 0; j < p1; ++j) {
        Z.col(j) = (Z.col(j).array() - fitted.col_means[j]) / fitted.col_sds[j];
    }
    const double n = static_cast<double>(fitted.n_rows);
    for (Eigen::Index s = 0; s < fitted.n_levels; ++s) {
        Z.col(p1 + s).array() -= fitted.level_counts[s] / n;
    }
    return Z;
}

}  // namespace mixfactor
