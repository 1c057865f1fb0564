#include "mixfactor/mixed_table.hpp"

#include <cmath>
#include <unordered_set>

namespace mixfactor {

void MixedTable::validate() const {
    for (const auto& col : columns) {
        if (col.kind == VarKind::Numeric) {
            if (col.values.size() != n_rows) {
                throw SchemaError("column " + col.name + " has " +
                                  std::to_string(col.values.size()) + " cells, expected " +
                                  std::to_string(n_rows));
            }
            for (double v : col.values) {
                if (!std::isfinite(v)) {
                    throw NumericError("non-finite value in column " + col.name);
                }
            }
        } else {
            if (col.labels.size() != n_rows) {
                throw SchemaError("column " + col.name + " has " +
                                  std::to_string(col.labels.size()) + " cells, expected " +
                                  std::to_string(n_rows));
            }
            if (observed_levels(col).size() < 2) {
                throw SchemaError("categorical variable " + col.name +
                                  " has fewer than 2 observed levels");
            }
        }
    }
    if (!row_ids.empty() && row_ids.size() != n_rows) {
        throw SchemaError("row identifier count does not match the number of rows");
    }
}

std::vector<std::string> observed_levels(const Column& col) {
    std::vector<std::string> levels;
    std::unordered_set<std::string> seen;
    for (const auto& label : col.labels) {
        if (seen.insert(label).second) {
            levels.push_back(label);
        }
    }
    return levels;
}

}  // namespace mixfactor
