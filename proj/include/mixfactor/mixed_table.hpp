#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mixfactor/errors.hpp"

namespace mixfactor {

enum class VarKind { Numeric, Categorical };

/// One variable of a mixed table. Numeric columns keep their cells in
/// `values`, categorical columns keep the level label of every cell in
/// `labels`; the unused vector stays empty.
struct Column {
    std::string name;
    VarKind kind = VarKind::Numeric;
    std::vector<double> values;
    std::vector<std::string> labels;
};

/// Observations x variables, no missing cells. Row identifiers are
/// optional and never enter the analysis.
struct MixedTable {
    std::size_t n_rows = 0;
    std::vector<Column> columns;
    std::vector<std::string> row_ids;

    std::size_t n_vars() const { return columns.size(); }

    /// Throws SchemaError when a column length disagrees with n_rows or a
    /// categorical variable has fewer than two observed levels; throws
    /// NumericError on non-finite numeric cells.
    void validate() const;
};

/// Distinct levels of a categorical column in first-appearance order.
std::vector<std::string> observed_levels(const Column& col);

}  // namespace mixfactor
