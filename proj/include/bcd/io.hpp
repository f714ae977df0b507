#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bcd {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

// 17 significant digits, '.' decimal point, independent of the global locale
std::string format_double(double v);

// RFC 4180: CRLF line endings, fields quoted when they contain ',', '"', CR or LF.
std::string to_csv(const Table& t);
// Inverse of to_csv; every field comes back as a string.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace bcd
