#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hierband/csv.hpp"

namespace hierband {

/// Aggregation of per-category item ratings: the mean of everything, the
/// mean of the best fraction, and the weight-proportional mean.

double simple_average(const std::vector<double>& ratings);

/// Mean of the top ceil(alpha * n) ratings (never fewer than one),
/// descending order stabilized by input position.
double top_alpha_average(const std::vector<double>& ratings, double alpha);

/// Sum(w * r) / Sum(w); weights must be nonnegative with a positive sum.
double weighted_average(const std::vector<double>& ratings,
                        const std::vector<double>& weights);

struct RatingEntry {
  std::string item;
  double rating = 0.0;
  std::optional<double> weight;
};

/// Ratings grouped per category on the fixed 1..5 scale. Categories are
/// kept in lexicographic order; a category mixes weighted and unweighted
/// entries only by error.
struct RatingTable {
  static constexpr double kMinRating = 1.0;
  static constexpr double kMaxRating = 5.0;

  std::map<std::string, std::vector<RatingEntry>> categories;

  /// Builds and validates a table from parsed CSV rows
  /// (`category,item,rating[,weight]`).
  static RatingTable from_rows(const std::vector<csv::RatingRow>& rows);
};

struct AggregateRow {
  std::string category;
  double simple = 0.0;
  std::vector<double> top_alpha;  // parallel to the alphas argument
  std::optional<double> weighted; // present when the category has weights
};

/// One row per category, ordered by category label.
std::vector<AggregateRow> compare_aggregates(const RatingTable& table,
                                             const std::vector<double>& alphas);

}  // namespace hierband
