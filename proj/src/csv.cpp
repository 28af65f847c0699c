#include "hierband/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace hierband::csv {
namespace {

std::string loc(const std::string& path, int line) {
  return path + ":" + std::to_string(line);
}

[[noreturn]] void fail(const std::string& path, int line,
                       const std::string& msg) {
  throw std::runtime_error(loc(path, line) + ": " + msg);
}

// Reads all lines, stripping a trailing '\r' and dropping empty lines.
// Returns (line_text, line_number) pairs; line numbers are 1-based.
std::vector<std::pair<std::string, int>> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<std::pair<std::string, int>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.emplace_back(line, number);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  return out;
}

}  // namespace

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, const std::string& where) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw std::runtime_error(where + ": bad number '" + field + "'");
  if (!std::isfinite(value))
    throw std::runtime_error(where + ": non-finite value '" + field + "'");
  return value;
}

long parse_id(const std::string& field, const std::string& where) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value < 0)
    throw std::runtime_error(where + ": bad id '" + field + "'");
  return value;
}

std::string format_double_exact(double v) {
  char buf[64];
  // Shortest representation that round-trips: try increasing precision.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string format_double_compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

ContextTable read_context_csv(const std::string& path,
                              const std::string& id_column) {
  auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty file");

  auto header = split_fields(lines.front().first);
  if (header.empty() || header.front() != id_column)
    fail(path, lines.front().second,
         "header must start with '" + id_column + "'");
  int dim = static_cast<int>(header.size()) - 1;
  if (dim < 1) fail(path, lines.front().second, "no feature columns");
  for (int j = 0; j < dim; ++j)
    if (header[static_cast<std::size_t>(j) + 1] != "f" + std::to_string(j))
      fail(path, lines.front().second,
           "feature columns must be f0..f" + std::to_string(dim - 1));

  int count = static_cast<int>(lines.size()) - 1;
  if (count < 1) throw std::runtime_error(path + ": no data rows");

  ContextTable table;
  table.dim = dim;
  table.features.resize(dim, count);
  std::vector<bool> seen(static_cast<std::size_t>(count), false);
  for (int row = 1; row <= count; ++row) {
    const auto& [text, number] = lines[static_cast<std::size_t>(row)];
    auto fields = split_fields(text);
    if (static_cast<int>(fields.size()) != dim + 1)
      fail(path, number,
           "expected " + std::to_string(dim + 1) + " fields, got " +
               std::to_string(fields.size()));
    long id = parse_id(fields[0], loc(path, number));
    if (id >= count)
      fail(path, number,
           "id " + std::to_string(id) + " out of range (rows cover 0.." +
               std::to_string(count - 1) + ")");
    if (seen[static_cast<std::size_t>(id)])
      fail(path, number, "duplicate id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = true;
    for (int j = 0; j < dim; ++j)
      table.features(j, static_cast<int>(id)) =
          parse_double(fields[static_cast<std::size_t>(j) + 1],
                       loc(path, number));
  }
  return table;
}

void write_context_csv(const std::string& path, const std::string& id_column,
                       const Eigen::MatrixXd& features) {
  auto out = open_out(path);
  out << id_column;
  for (int j = 0; j < features.rows(); ++j) out << ",f" << j;
  out << "\n";
  for (int i = 0; i < features.cols(); ++i) {
    out << i;
    for (int j = 0; j < features.rows(); ++j)
      out << "," << format_double_exact(features(j, i));
    out << "\n";
  }
}

GraphTable read_graph_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty file");

  auto header = split_fields(lines.front().first);
  bool has_weights = false;
  if (header.size() == 3 && header[2] == "weight")
    has_weights = true;
  else if (header.size() != 2)
    fail(path, lines.front().second,
         "header must be item_id,keyterm_id[,weight]");
  if (header[0] != "item_id" || header[1] != "keyterm_id")
    fail(path, lines.front().second,
         "header must be item_id,keyterm_id[,weight]");

  GraphTable table;
  table.has_weights = has_weights;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto& [text, number] = lines[row];
    auto fields = split_fields(text);
    if (fields.size() != header.size())
      fail(path, number,
           "expected " + std::to_string(header.size()) + " fields, got " +
               std::to_string(fields.size()));
    CatalogEdge edge;
    edge.item = static_cast<int>(parse_id(fields[0], loc(path, number)));
    edge.keyterm = static_cast<int>(parse_id(fields[1], loc(path, number)));
    edge.weight = has_weights ? parse_double(fields[2], loc(path, number)) : 1.0;
    table.edges.push_back(edge);
    table.lines.push_back(number);
  }
  return table;
}

void write_graph_csv(const std::string& path,
                     const std::vector<CatalogEdge>& edges, bool with_weights) {
  auto out = open_out(path);
  out << (with_weights ? "item_id,keyterm_id,weight" : "item_id,keyterm_id")
      << "\n";
  for (const auto& edge : edges) {
    out << edge.item << "," << edge.keyterm;
    if (with_weights) out << "," << format_double_exact(edge.weight);
    out << "\n";
  }
}

std::vector<RatingRow> read_ratings_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty file");

  auto header = split_fields(lines.front().first);
  bool has_weights = false;
  if (header.size() == 4 && header[3] == "weight")
    has_weights = true;
  else if (header.size() != 3)
    fail(path, lines.front().second,
         "header must be category,item,rating[,weight]");
  if (header[0] != "category" || header[1] != "item" || header[2] != "rating")
    fail(path, lines.front().second,
         "header must be category,item,rating[,weight]");

  std::vector<RatingRow> rows;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto& [text, number] = lines[row];
    auto fields = split_fields(text);
    if (fields.size() != header.size())
      fail(path, number,
           "expected " + std::to_string(header.size()) + " fields, got " +
               std::to_string(fields.size()));
    RatingRow r;
    r.category = fields[0];
    r.item = fields[1];
    r.rating = parse_double(fields[2], loc(path, number));
    if (has_weights) r.weight = parse_double(fields[3], loc(path, number));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hierband::csv
