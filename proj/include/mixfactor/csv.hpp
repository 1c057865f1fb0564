#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixfactor/mixed_table.hpp"

namespace mixfactor {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC-4180-style reader: quoted fields, embedded separators and quotes.
/// IoError when the file cannot be opened, SchemaError on ragged rows or
/// duplicate headers.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

/// Builds a MixedTable from a CSV file. A column is numeric iff every cell
/// parses as a decimal number; overrides force a kind; `id_col` names a
/// column of row identifiers excluded from the analysis. Empty cells are
/// rejected.
MixedTable ingest_csv(const std::string& path,
                      const std::map<std::string, VarKind>& type_overrides = {},
                      const std::string& id_col = "");

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

/// Parses a full cell as a double; returns false when the cell is not a
/// plain decimal number.
bool parse_double(const std::string& cell, double& out);

std::string csv_escape(const std::string& field);

/// Writes a labeled matrix: header `corner,col0,col1,...`, one row label
/// per data row, values in shortest round-trip form.
void write_matrix_csv(const std::string& path, const std::string& corner,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels,
                      const Eigen::MatrixXd& values);

void write_mixed_table_csv(const std::string& path, const MixedTable& table,
                           const std::string& id_header = "id");

}  // namespace mixfactor
