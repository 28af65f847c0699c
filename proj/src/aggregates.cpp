#include "hierband/aggregates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hierband {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

double simple_average(const std::vector<double>& ratings) {
  require(!ratings.empty(), "average of an empty rating list");
  double sum = 0.0;
  for (double r : ratings) sum += r;
  return sum / static_cast<double>(ratings.size());
}

double top_alpha_average(const std::vector<double>& ratings, double alpha) {
  require(!ratings.empty(), "average of an empty rating list");
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0,
          "top fraction must lie in (0, 1]");
  std::size_t n = ratings.size();
  // ceil(alpha * n), guarded against the product landing a hair above an
  // integer in floating point; never fewer than one.
  auto m = static_cast<std::size_t>(
      std::ceil(alpha * static_cast<double>(n) - 1e-9));
  if (m < 1) m = 1;
  if (m > n) m = n;
  // Full fraction: sum in input order so the result is bit-identical to
  // the plain mean.
  if (m == n) return simple_average(ratings);

  std::vector<double> sorted(ratings);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](double a, double b) { return a > b; });
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += sorted[i];
  return sum / static_cast<double>(m);
}

double weighted_average(const std::vector<double>& ratings,
                        const std::vector<double>& weights) {
  require(!ratings.empty(), "average of an empty rating list");
  require(ratings.size() == weights.size(),
          "ratings and weights differ in length");
  double weighted_sum = 0.0, weight_sum = 0.0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    require(std::isfinite(weights[i]) && weights[i] >= 0.0,
            "weights must be finite and nonnegative");
    weighted_sum += weights[i] * ratings[i];
    weight_sum += weights[i];
  }
  require(weight_sum > 0.0, "weights sum to zero");
  return weighted_sum / weight_sum;
}

RatingTable RatingTable::from_rows(const std::vector<csv::RatingRow>& rows) {
  require(!rows.empty(), "rating table has no rows");
  RatingTable table;
  for (const auto& row : rows) {
    std::string where = "category '" + row.category + "' item '" + row.item + "'";
    require(std::isfinite(row.rating) && row.rating >= kMinRating &&
                row.rating <= kMaxRating,
            where + ": rating outside [1, 5]");
    if (row.weight)
      require(std::isfinite(*row.weight) && *row.weight >= 0.0,
              where + ": negative weight");
    table.categories[row.category].push_back(
        RatingEntry{row.item, row.rating, row.weight});
  }
  for (const auto& [category, entries] : table.categories) {
    bool first_weighted = entries.front().weight.has_value();
    for (const auto& entry : entries)
      require(entry.weight.has_value() == first_weighted,
              "category '" + category +
                  "' mixes weighted and unweighted entries");
  }
  return table;
}

std::vector<AggregateRow> compare_aggregates(
    const RatingTable& table, const std::vector<double>& alphas) {
  require(!table.categories.empty(), "rating table has no categories");
  std::vector<AggregateRow> report;
  for (const auto& [category, entries] : table.categories) {
    require(!entries.empty(), "category '" + category + "' has no entries");
    std::vector<double> ratings;
    std::vector<double> weights;
    bool weighted = entries.front().weight.has_value();
    for (const auto& entry : entries) {
      ratings.push_back(entry.rating);
      if (weighted) weights.push_back(*entry.weight);
    }

    AggregateRow row;
    row.category = category;
    row.simple = simple_average(ratings);
    for (double alpha : alphas)
      row.top_alpha.push_back(top_alpha_average(ratings, alpha));
    if (weighted) row.weighted = weighted_average(ratings, weights);
    report.push_back(std::move(row));
  }
  return report;
}

}  // namespace hierband
