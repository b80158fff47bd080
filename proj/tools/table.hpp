// table.hpp - row tables rendered as CSV or JSON

#pragma once

#include "json.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qmon::cli {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void append(const Table& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

// Reals are written as 17 significant digits in scientific notation ("%.16e").
std::string format_real(double x);

void write_csv(std::ostream& os, const Table& table);

// Array of objects keyed by the header.
nlohmann::ordered_json to_json(const Table& table);

} // namespace qmon::cli
