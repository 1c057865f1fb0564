#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mixfactor/gsvd.hpp"
#include "mixfactor/mixed_table.hpp"

namespace mixfactor {

/// Per-variable bookkeeping inside a Preprocessed: which Z columns the
/// variable owns (one for a numeric, one per level for a categorical) and,
/// for categoricals, the level dictionary plus the level index of every
/// training row.
struct VariableInfo {
    std::string name;
    VarKind kind = VarKind::Numeric;
    std::vector<Eigen::Index> z_cols;
    std::vector<std::string> levels;       // first-appearance order
    std::vector<std::int32_t> level_of_row;
};

/// Output of the pre-processing phase: Z = [Z1, Z2] with standardized
/// numerics and the centered indicator matrix, the row metric N = (1/n) I
/// and the column metric M = (1,...,1, n/n_1,...,n/n_m), plus everything
/// needed to transform new observations with the training statistics.
struct Preprocessed {
    Eigen::MatrixXd Z;            // n x (p1 + m)
    DiagMetric N;                 // length n, all 1/n
    DiagMetric M;                 // length p1 + m
    Eigen::VectorXd col_means;    // numeric columns (p1)
    Eigen::VectorXd col_sds;      // numeric columns (p1), population sd
    Eigen::VectorXd level_counts; // indicator columns (m)
    std::vector<std::string> numeric_names;
    std::vector<std::string> level_names;  // label per indicator column
    std::vector<VariableInfo> variables;   // input order
    Eigen::Index n_rows = 0;
    Eigen::Index n_numeric = 0;      // p1
    Eigen::Index n_categorical = 0;  // p2
    Eigen::Index n_levels = 0;       // m
    double total_inertia = 0.0;      // p1 + m - p2

    Eigen::Index n_zcols() const { return n_numeric + n_levels; }
    /// Column index sets I_j in variable input order.
    std::vector<std::vector<Eigen::Index>> var_index() const;
};

/// Splits a mixed table into its numeric and categorical parts, keeping
/// the column order within each part.
std::pair<MixedTable, MixedTable> splitmix(const MixedTable& table);

struct StandardizeResult {
    Eigen::MatrixXd Z1;
    Eigen::VectorXd means;
    Eigen::VectorXd sds;  // population (1/n) standard deviations
};

/// Centers and scales each column to mean 0 and population variance 1, so
/// that (1/n) Z1^t Z1 is the correlation matrix. Throws SchemaError on a
/// zero-variance column, naming it when `names` is provided.
StandardizeResult standardize(const Eigen::MatrixXd& X1,
                              const std::vector<std::string>& names = {});

struct IndicatorResult {
    Eigen::MatrixXd G;  // n x m, one 1 per row within each variable block
    Eigen::VectorXd level_counts;
    std::vector<std::string> level_names;
    std::vector<std::vector<std::string>> levels_per_var;   // first-appearance order
    std::vector<std::vector<std::int32_t>> level_of_row;    // per variable
};

/// Codes categorical columns as a 0/1 indicator matrix, levels in
/// first-appearance order. With rename_levels the indicator columns are
/// labeled "variable=level", which disambiguates labels shared across
/// variables.
IndicatorResult indicator(const std::vector<Column>& categoricals, std::size_t n_rows,
                          bool rename_levels = false);

/// Full pre-processing phase for a valid mixed table.
Preprocessed build_preprocessed(const MixedTable& table, bool rename_levels = false);

/// Raw design matrix (X1 | G) of a new table against a fitted
/// preprocessing: numeric values as-is, indicator columns uncentered.
/// Variables are matched by name; throws SchemaError on missing or extra
/// columns, kind mismatches, and unseen levels.
Eigen::MatrixXd raw_design(const MixedTable& new_table, const Preprocessed& fitted);

/// Transforms new observations with the training means, sds and level
/// frequencies. Same validation as raw_design.
Eigen::MatrixXd apply_preprocess(const MixedTable& new_table, const Preprocessed& fitted);

}  // namespace mixfactor
