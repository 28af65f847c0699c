#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hierband/catalog.hpp"

namespace hierband::csv {

/// Feature table keyed by dense ids: column j holds the features of id j.
struct ContextTable {
  int dim = 0;
  Eigen::MatrixXd features;  // dim x count
};

/// Reads `<id_column>,f0,...,f{d-1}` rows. Ids must be exactly 0..n-1,
/// unique, in any order. Throws std::runtime_error naming file and line.
ContextTable read_context_csv(const std::string& path,
                              const std::string& id_column);

void write_context_csv(const std::string& path, const std::string& id_column,
                       const Eigen::MatrixXd& features);

struct GraphTable {
  std::vector<CatalogEdge> edges;  // weight 1.0 when the column is absent
  bool has_weights = false;
  std::vector<int> lines;  // source line per edge, for error reporting
};

/// Reads `item_id,keyterm_id[,weight]`; absent weight column means binary.
GraphTable read_graph_csv(const std::string& path);

void write_graph_csv(const std::string& path,
                     const std::vector<CatalogEdge>& edges, bool with_weights);

struct RatingRow {
  std::string category;
  std::string item;
  double rating = 0.0;
  std::optional<double> weight;
};

/// Reads `category,item,rating[,weight]`. Labels are plain unquoted text.
std::vector<RatingRow> read_ratings_csv(const std::string& path);

/// Splits one line on commas; no quoting.
std::vector<std::string> split_fields(const std::string& line);

/// Strict double parse; throws std::runtime_error with the given location.
double parse_double(const std::string& field, const std::string& where);

/// Strict nonnegative integer parse.
long parse_id(const std::string& field, const std::string& where);

/// Shortest-faithful formatting for data files (round-trips exactly).
std::string format_double_exact(double v);

/// Compact formatting for plot-data files (deterministic, 10 significant digits).
std::string format_double_compact(double v);

}  // namespace hierband::csv
