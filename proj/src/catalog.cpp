#include "hierband/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hierband {

namespace {
constexpr double kRowSumTolerance = 1e-9;

void sort_by_id(std::vector<IdWeight>& v) {
  std::sort(v.begin(), v.end(),
            [](const IdWeight& a, const IdWeight& b) { return a.id < b.id; });
}
}  // namespace

Catalog::Catalog(int num_items, int num_keyterms,
                 const std::vector<CatalogEdge>& edges)
    : num_items_(num_items), num_keyterms_(num_keyterms) {
  if (num_items < 0 || num_keyterms < 0) {
    throw std::invalid_argument("catalog sizes must be nonnegative");
  }
  members_.resize(num_keyterms);
  item_rows_.resize(num_items);

  std::set<std::pair<int, int>> seen;
  for (const CatalogEdge& e : edges) {
    if (e.item < 0 || e.item >= num_items) {
      throw std::invalid_argument("edge item id out of range: " +
                                  std::to_string(e.item));
    }
    if (e.keyterm < 0 || e.keyterm >= num_keyterms) {
      throw std::invalid_argument("edge key-term id out of range: " +
                                  std::to_string(e.keyterm));
    }
    if (!seen.insert({e.item, e.keyterm}).second) {
      throw std::invalid_argument("duplicate edge (item " +
                                  std::to_string(e.item) + ", key-term " +
                                  std::to_string(e.keyterm) + ")");
    }
    if (e.weight == 0.0) continue;  // non-member by definition
    members_[e.keyterm].push_back({e.item, e.weight});
    item_rows_[e.item].push_back({e.keyterm, e.weight});
  }
  for (auto& v : members_) sort_by_id(v);
  for (auto& v : item_rows_) sort_by_id(v);
}

double Catalog::weight(int item, int keyterm) const {
  if (item < 0 || item >= num_items_) {
    throw std::invalid_argument("item id out of range: " + std::to_string(item));
  }
  if (keyterm < 0 || keyterm >= num_keyterms_) {
    throw std::invalid_argument("key-term id out of range: " +
                                std::to_string(keyterm));
  }
  for (const IdWeight& e : item_rows_[item]) {
    if (e.id == keyterm) return e.weight;
  }
  return 0.0;
}

const std::vector<IdWeight>& Catalog::items_of(int keyterm) const {
  if (keyterm < 0 || keyterm >= num_keyterms_) {
    throw std::invalid_argument("key-term id out of range: " +
                                std::to_string(keyterm));
  }
  return members_[keyterm];
}

const std::vector<IdWeight>& Catalog::keyterms_of(int item) const {
  if (item < 0 || item >= num_items_) {
    throw std::invalid_argument("item id out of range: " + std::to_string(item));
  }
  return item_rows_[item];
}

std::vector<std::string> Catalog::validate() const {
  std::vector<std::string> report;
  for (int a = 0; a < num_items_; ++a) {
    double row_sum = 0.0;
    for (const IdWeight& e : item_rows_[a]) {
      if (e.weight < 0.0) {
        report.push_back("negative weight item " + std::to_string(a) +
                         " key-term " + std::to_string(e.id));
      }
      row_sum += e.weight;
    }
    if (item_rows_[a].empty()) {
      report.push_back("empty item " + std::to_string(a));
    } else if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
      report.push_back("row-sum violation item " + std::to_string(a) +
                       " (sum " + std::to_string(row_sum) + ")");
    }
  }
  for (int k = 0; k < num_keyterms_; ++k) {
    if (members_[k].empty()) {
      report.push_back("empty key-term " + std::to_string(k));
    }
  }
  return report;
}

Catalog normalize_weights(int num_items, int num_keyterms,
                          const std::vector<CatalogEdge>& raw) {
  for (const CatalogEdge& e : raw) {
    if (e.weight < 0.0) {
      throw std::invalid_argument("negative raw weight on item " +
                                  std::to_string(e.item));
    }
  }
  std::vector<double> row_sums(num_items, 0.0);
  for (const CatalogEdge& e : raw) {
    if (e.item >= 0 && e.item < num_items) row_sums[e.item] += e.weight;
  }
  for (int a = 0; a < num_items; ++a) {
    if (row_sums[a] <= 0.0) {
      throw std::invalid_argument("item " + std::to_string(a) +
                                  " has an all-zero weight row");
    }
  }
  std::vector<CatalogEdge> scaled;
  scaled.reserve(raw.size());
  for (const CatalogEdge& e : raw) {
    scaled.push_back({e.item, e.keyterm, e.weight / row_sums[e.item]});
  }
  Catalog catalog(num_items, num_keyterms, scaled);
  for (int k = 0; k < num_keyterms; ++k) {
    if (catalog.items_of(k).empty()) {
      throw std::invalid_argument("key-term " + std::to_string(k) +
                                  " has no member items");
    }
  }
  return catalog;
}

}  // namespace hierband
