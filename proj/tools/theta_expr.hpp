// theta_expr.hpp - parsing of time-step values and grids given on the command line
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | primary
//   primary := number | "pi" | '(' expr ')'
// Numbers are decimal literals with optional exponent ("1e-2", ".5").
// A grid is "start:stop:count" with expressions for start/stop and count >= 1 points,
// both ends included.

#pragma once

#include <string_view>
#include <vector>

namespace qmon::cli {

// Throws std::invalid_argument on malformed input.
double parse_theta(std::string_view text);

// Single expression or start:stop:count grid.
std::vector<double> parse_theta_grid(std::string_view text);

} // namespace qmon::cli
