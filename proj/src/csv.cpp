#include "mixfactor/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace mixfactor {

namespace {

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&]() {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') {
                field.pop_back();
            }
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw SchemaError("unterminated quoted field");
    }
    if (!field.empty() || !record.empty()) {
        if (!field.empty() && field.back() == '\r') {
            field.pop_back();
        }
        end_record();
    }
    return records;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    auto records = parse_records(text);
    if (records.empty()) {
        throw SchemaError("CSV has no header row");
    }
    CsvTable table;
    table.header = std::move(records.front());
    std::unordered_set<std::string> seen;
    for (const auto& name : table.header) {
        if (!seen.insert(name).second) {
            throw SchemaError("duplicate header " + name);
        }
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw SchemaError("ragged row " + std::to_string(r) + ": " +
                              std::to_string(records[r].size()) + " fields, expected " +
                              std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

bool parse_double(const std::string& cell, double& out) {
    std::size_t begin = cell.find_first_not_of(" \t");
    if (begin == std::string::npos) {
        return false;
    }
    const std::size_t end = cell.find_last_not_of(" \t") + 1;
    const char* first = cell.data() + begin;
    const char* last = cell.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

MixedTable ingest_csv(const std::string& path, const std::map<std::string, VarKind>& type_overrides,
                      const std::string& id_col) {
    const CsvTable csv = read_csv(path);
    const std::size_t n_rows = csv.rows.size();
    const std::size_t n_cols = csv.header.size();

    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (csv.rows[r][c].empty()) {
                throw SchemaError("empty cell in column " + csv.header[c] + ", row " +
                                  std::to_string(r + 1));
            }
        }
    }

    std::size_t id_index = n_cols;
    if (!id_col.empty()) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (csv.header[c] == id_col) {
                id_index = c;
                break;
            }
        }
        if (id_index == n_cols) {
            throw SchemaError("id column " + id_col + " not found");
        }
    }
    for (const auto& [name, kind] : type_overrides) {
        (void)kind;
        if (std::find(csv.header.begin(), csv.header.end(), name) == csv.header.end()) {
            throw SchemaError("type override names unknown column " + name);
        }
    }

    MixedTable table;
    table.n_rows = n_rows;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c == id_index) {
            table.row_ids.reserve(n_rows);
            for (const auto& row : csv.rows) {
                table.row_ids.push_back(row[c]);
            }
            continue;
        }
        Column col;
        col.name = csv.header[c];

        std::vector<double> parsed(n_rows);
        bool all_numeric = true;
        for (std::size_t r = 0; r < n_rows && all_numeric; ++r) {
            all_numeric = parse_double(csv.rows[r][c], parsed[r]);
        }
        auto override_it = type_overrides.find(col.name);
        const VarKind kind = override_it != type_overrides.end()
                                 ? override_it->second
                                 : (all_numeric ? VarKind::Numeric : VarKind::Categorical);
        if (kind == VarKind::Numeric && !all_numeric) {
            throw SchemaError("column " + col.name +
                              " was forced numeric but has non-numeric cells");
        }
        col.kind = kind;
        if (kind == VarKind::Numeric) {
            col.values = std::move(parsed);
        } else {
            col.labels.reserve(n_rows);
            for (const auto& row : csv.rows) {
                col.labels.push_back(row[c]);
            }
        }
        table.columns.push_back(std::move(col));
    }
    return table;
}

std::string format_double(double value) {
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    (void)ec;
    return std::string(buffer, ptr);
}

std::string csv_escape(const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_matrix_csv(const std::string& path, const std::string& corner,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels,
                      const Eigen::MatrixXd& values) {
    if (static_cast<Eigen::Index>(row_labels.size()) != values.rows() ||
        static_cast<Eigen::Index>(col_labels.size()) != values.cols()) {
        throw SchemaError("write_matrix_csv: label counts do not match the matrix");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << csv_escape(corner);
    for (const auto& label : col_labels) {
        out << ',' << csv_escape(label);
    }
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        out << csv_escape(row_labels[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out << ',' << format_double(values(r, c));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

void write_mixed_table_csv(const std::string& path, const MixedTable& table,
                           const std::string& id_header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    bool first = true;
    if (!table.row_ids.empty()) {
        out << csv_escape(id_header);
        first = false;
    }
    for (const auto& col : table.columns) {
        if (!first) {
            out << ',';
        }
        out << csv_escape(col.name);
        first = false;
    }
    out << '\n';
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        first = true;
        if (!table.row_ids.empty()) {
            out << csv_escape(table.row_ids[r]);
            first = false;
        }
        for (const auto& col : table.columns) {
            if (!first) {
                out << ',';
            }
            if (col.kind == VarKind::Numeric) {
                out << format_double(col.values[r]);
            } else {
                out << csv_escape(col.labels[r]);
            }
            first = false;
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

}  // namespace mixfactor
