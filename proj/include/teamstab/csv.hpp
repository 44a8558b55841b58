#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "teamstab/errors.hpp"

namespace teamstab::csv {

// Minimal delimiter-separated text support: double-quote escaping, CR-LF
// tolerant, no multi-line fields.

/// Splits one record into fields. A field wrapped in double quotes may
/// contain the delimiter; an embedded quote is written as "".
inline std::vector<std::string> split_record(const std::string& line, char delim,
                                             std::size_t row_number = 0) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError("unbalanced quote", row_number);
    fields.push_back(std::move(field));
    return fields;
}

/// Reads all non-empty lines as records. Row numbers are 1-based and include
/// the header line.
inline std::vector<std::vector<std::string>> read_table(std::istream& in, char delim) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_record(line, delim, row_number));
    }
    return rows;
}

inline std::string quote_field(const std::string& field, char delim) {
    if (field.find(delim) == std::string::npos && field.find('"') == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_record(std::ostream& out, const std::vector<std::string>& fields, char delim) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k > 0) out << delim;
        out << quote_field(fields[k], delim);
    }
    out << '\n';
}

}  // namespace teamstab::csv
