#pragma once

// Text formats: shortest round-trip numbers for CSV, 17 significant digits
// for JSON reports, and the observation table reader.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmlin/fit.hpp"

namespace mmlin::io {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_shortest(double v);

/// `v` with 17 significant digits ("%.17g"); non-finite values become null
/// when written as JSON.
std::string format_17(double v);

/// Deterministic JSON writer: keys in the order nlohmann::ordered_json keeps
/// them, two-space indentation, floating-point numbers with 17 significant
/// digits, trailing newline.
void write_json(std::ostream& out, const nlohmann::ordered_json& doc);
std::string dump_json(const nlohmann::ordered_json& doc);

/// Reads a comma-separated table with a header naming the columns
/// t, s[, c][, weight] in any order. Blank c or weight cells mean "absent"
/// and weight 1 respectively. Throws InvalidInput on a missing t or s
/// column, unknown columns, or unparsable cells.
std::vector<Observation> read_observations_csv(std::istream& in);

void write_observations_csv(std::ostream& out, const std::vector<Observation>& data);

}  // namespace mmlin::io
