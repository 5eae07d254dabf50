#include "mmlin/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "mmlin/error.hpp"

namespace mmlin::io {

namespace {

void write_value(std::ostream& out, const nlohmann::ordered_json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) out << ",\n";
      first = false;
      out << pad << nlohmann::json(it.key()).dump() << ": ";
      write_value(out, it.value(), indent + 2);
    }
    out << "\n" << close << "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out << "[]";
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) out << ",\n";
      out << pad;
      write_value(out, v[i], indent + 2);
    }
    out << "\n" << close << "]";
  } else if (v.is_number_float()) {
    const double d = v.get<double>();
    out << (std::isfinite(d) ? format_17(d) : "null");
  } else {
    out << v.dump();
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw InvalidInput("line " + std::to_string(line_no) + ": cannot parse '" +
                       std::string(cell) + "' as a number");
  }
  return v;
}

}  // namespace

std::string format_shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_json(std::ostream& out, const nlohmann::ordered_json& doc) {
  write_value(out, doc, 0);
  out << "\n";
}

std::string dump_json(const nlohmann::ordered_json& doc) {
  std::ostringstream os;
  write_json(os, doc);
  return os.str();
}

std::vector<Observation> read_observations_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw InvalidInput("observation table is empty");

  int col_t = -1, col_s = -1, col_c = -1, col_w = -1;
  const auto header = split(line);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = header[i];
    int* slot = name == "t" ? &col_t
                : name == "s" ? &col_s
                : name == "c" ? &col_c
                : name == "weight" ? &col_w
                : nullptr;
    if (slot == nullptr) {
      throw InvalidInput("unknown column '" + std::string(name) +
                         "' (expected t, s, c, weight)");
    }
    if (*slot >= 0) throw InvalidInput("duplicate column '" + std::string(name) + "'");
    *slot = static_cast<int>(i);
  }
  if (col_t < 0) throw InvalidInput("observation table has no 't' column");
  if (col_s < 0) throw InvalidInput("observation table has no 's' column");

  std::vector<Observation> data;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " cells, got " +
                         std::to_string(cells.size()));
    }
    Observation o;
    o.t = parse_cell(cells[static_cast<std::size_t>(col_t)], line_no);
    o.s_obs = parse_cell(cells[static_cast<std::size_t>(col_s)], line_no);
    if (col_c >= 0 && !cells[static_cast<std::size_t>(col_c)].empty()) {
      o.c_obs = parse_cell(cells[static_cast<std::size_t>(col_c)], line_no);
    }
    if (col_w >= 0 && !cells[static_cast<std::size_t>(col_w)].empty()) {
      o.weight = parse_cell(cells[static_cast<std::size_t>(col_w)], line_no);
    }
    data.push_back(o);
  }
  return data;
}

void write_observations_csv(std::ostream& out, const std::vector<Observation>& data) {
  const bool has_c = std::any_of(data.begin(), data.end(),
                                 [](const Observation& o) { return o.c_obs.has_value(); });
  out << (has_c ? "t,s,c,weight\n" : "t,s,weight\n");
  for (const Observation& o : data) {
    out << format_shortest(o.t) << ',' << format_shortest(o.s_obs);
    if (has_c) out << ',' << (o.c_obs ? format_shortest(*o.c_obs) : std::string());
    out << ',' << format_shortest(o.weight) << '\n';
  }
}

}  // namespace mmlin::io
