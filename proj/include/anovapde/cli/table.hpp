#pragma once

// Result rows of the experiment runner and their CSV / aligned-text rendering.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "anovapde/error.hpp"

namespace anovapde::cli {

enum class TableFormat { csv, plain };

inline TableFormat parse_format(const std::string& s) {
    if (s == "csv") return TableFormat::csv;
    if (s == "plain") return TableFormat::plain;
    throw ConfigError("--format must be 'csv' or 'plain', got '" + s + "'");
}

struct Row {
    std::string experiment;
    std::string product;  // bermudan | ratchet
    int n = 0;
    double strike = 0.0;
    std::string coefficients;  // "a/b/c" for ratchets
    std::string method;        // pde | mc | both | vrst
    std::string item;
    std::optional<int> k;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> gap_std_error;
    std::optional<double> midpoint;
    std::optional<double> reference;
    std::string reference_source;  // data | mc
    std::optional<long> paths;
    std::optional<std::uint64_t> seed;
    std::optional<double> wall_seconds;
};

struct TableOptions {
    TableFormat format = TableFormat::csv;
    bool full_precision = false;  // adds value_exact (17 significant digits)
    bool timing = false;          // adds wall_seconds; output is then no longer reproducible
};

inline std::string format_g(double v, int digits = 6) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// RFC 4180: quote fields holding a comma, quote, CR or LF; double inner quotes.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> table_header(const TableOptions& opt) {
    std::vector<std::string> h = {"experiment", "product",       "N",        "K",        "coefficients",
                                  "method",     "item",          "k",        "value",    "std_error",
                                  "lower",      "upper",         "gap_std_error", "midpoint", "reference",
                                  "reference_source", "delta_abs", "delta_rel", "paths", "seed"};
    if (opt.full_precision) h.push_back("value_exact");
    if (opt.timing) h.push_back("wall_seconds");
    return h;
}

inline std::vector<std::string> table_cells(const Row& r, const TableOptions& opt) {
    auto opt_g = [](const std::optional<double>& v) { return v ? format_g(*v) : std::string(); };
    std::vector<std::string> c = {r.experiment,
                                  r.product,
                                  std::to_string(r.n),
                                  format_g(r.strike),
                                  r.coefficients,
                                  r.method,
                                  r.item,
                                  r.k ? std::to_string(*r.k) : std::string(),
                                  format_g(r.value),
                                  opt_g(r.std_error),
                                  opt_g(r.lower),
                                  opt_g(r.upper),
                                  opt_g(r.gap_std_error),
                                  opt_g(r.midpoint),
                                  opt_g(r.reference),
                                  r.reference ? r.reference_source : std::string(),
                                  r.reference ? format_g(r.value - *r.reference) : std::string(),
                                  r.reference && *r.reference != 0.0 ? format_g((r.value - *r.reference) / *r.reference)
                                                                     : std::string(),
                                  r.paths ? std::to_string(*r.paths) : std::string(),
                                  r.seed ? std::to_string(*r.seed) : std::string()};
    if (opt.full_precision) c.push_back(format_g(r.value, 17));
    if (opt.timing) c.push_back(r.wall_seconds ? format_g(*r.wall_seconds, 4) : std::string());
    return c;
}

/// Header plus one line per row. Plain text pads every column to its widest cell.
inline void emit_table(std::ostream& os, const std::vector<Row>& rows, const TableOptions& opt) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(table_header(opt));
    for (const Row& r : rows) cells.push_back(table_cells(r, opt));
    if (opt.format == TableFormat::csv) {
        for (const auto& line : cells) {
            for (std::size_t i = 0; i < line.size(); ++i) os << (i ? "," : "") << csv_field(line[i]);
            os << "\r\n";
        }
    } else {
        std::vector<std::size_t> width(cells[0].size(), 0);
        for (const auto& line : cells)
            for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
        for (const auto& line : cells) {
            std::string s;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (i) s += "  ";
                s += line[i];
                if (i + 1 < line.size()) s.append(width[i] - line[i].size(), ' ');
            }
            os << s << '\n';
        }
    }
    if (!os) throw IoError("failed writing the result table");
}

}  // namespace anovapde::cli
