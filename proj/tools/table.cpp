#include "table.hpp"

#include <cmath>
#include <cstdio>

namespace qmon::cli {

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

struct CsvCell {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return v; }
};

} // namespace

void write_csv(std::ostream& os, const Table& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        os << (i ? "," : "") << table.header[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << std::visit(CsvCell{}, row[i]);
        }
        os << '\n';
    }
}

nlohmann::ordered_json to_json(const Table& table) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        obj[table.header[i]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
                    } else {
                        obj[table.header[i]] = v;
                    }
                },
                row[i]);
        }
        out.push_back(std::move(obj));
    }
    return out;
}

} // namespace qmon::cli
