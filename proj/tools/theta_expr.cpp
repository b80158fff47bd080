#include "theta_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmon::cli {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    double parse() {
        const double v = expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        if (!std::isfinite(v)) {
            fail("value is not finite");
        }
        return v;
    }

private:
    std::string_view text_;
    std::size_t pos_{0};

    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("cannot parse theta '" + std::string(text_) + "': " + why);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (accept('+')) v += term();
            else if (accept('-')) v -= term();
            else return v;
        }
    }

    double term() {
        double v = unary();
        for (;;) {
            if (accept('*')) v *= unary();
            else if (accept('/')) v /= unary();
            else return v;
        }
    }

    double unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return primary();
    }

    double primary() {
        skip_space();
        if (accept('(')) {
            const double v = expr();
            if (!accept(')')) fail("missing ')'");
            return v;
        }
        if (text_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return std::numbers::pi;
        }
        if (pos_ < text_.size() &&
            (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            // decimal literal only; strtod alone would also take hex and "infinity"
            const std::size_t begin = pos_;
            auto digits = [&] {
                std::size_t n = 0;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
                return n;
            };
            std::size_t mantissa = digits();
            if (pos_ < text_.size() && text_[pos_] == '.') {
                ++pos_;
                mantissa += digits();
            }
            if (mantissa == 0) fail("bad number");
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                ++pos_;
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
                if (digits() == 0) fail("bad exponent");
            }
            return std::strtod(std::string(text_.substr(begin, pos_ - begin)).c_str(), nullptr);
        }
        fail(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'"
                                 : "unexpected end of input");
    }
};

} // namespace

double parse_theta(std::string_view text) { return Parser(text).parse(); }

std::vector<double> parse_theta_grid(std::string_view text) {
    const auto first = text.find(':');
    if (first == std::string_view::npos) {
        return {parse_theta(text)};
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw std::invalid_argument("theta grid must be start:stop:count, got '" + std::string(text) + "'");
    }
    const double start = parse_theta(text.substr(0, first));
    const double stop = parse_theta(text.substr(first + 1, second - first - 1));
    const std::string count_text(text.substr(second + 1));
    std::size_t used = 0;
    long count = 0;
    try {
        count = std::stol(count_text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != count_text.size() || count < 1) {
        throw std::invalid_argument("theta grid count must be a positive integer, got '" +
                                    count_text + "'");
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        grid[static_cast<std::size_t>(i)] =
            (count == 1) ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return grid;
}

} // namespace qmon::cli
