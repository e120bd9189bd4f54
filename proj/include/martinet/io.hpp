#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "martinet/errors.hpp"

namespace martinet::io {

/// Decimal text that round-trips a double exactly (17 significant digits).
inline std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot open output file: " + path);
    out << content;
    if (!out) throw domain_error("write failed: " + path);
}

/// CSV with a header row; cells are preformatted strings.
inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string s = header + "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) s += ',';
            s += row[i];
        }
        s += '\n';
    }
    write_text(path, s);
}

}  // namespace martinet::io
