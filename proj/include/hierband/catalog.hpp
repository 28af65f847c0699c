#pragma once

#include <string>
#include <vector>

namespace hierband {

/// One edge of the item / key-term bipartite graph.
struct CatalogEdge {
  int item;
  int keyterm;
  double weight;
};

/// An (id, weight) pair; the id is an item or a key-term depending on
/// which side of the graph is being listed.
struct IdWeight {
  int id;
  double weight;

  bool operator==(const IdWeight&) const = default;
};

/// Weighted bipartite graph between items and key-terms.
///
/// Construction only checks ids and duplicate edges; semantic invariants
/// (nonnegative weights, unit row sums, no empty rows or key-terms) are
/// reported by validate() so callers can inspect broken inputs.
/// Immutable after construction and safe to share across workers.
class Catalog {
 public:
  Catalog(int num_items, int num_keyterms, const std::vector<CatalogEdge>& edges);

  int num_items() const { return num_items_; }
  int num_keyterms() const { return num_keyterms_; }

  /// Stored weight W[item,keyterm]; 0 for non-members.
  double weight(int item, int keyterm) const;

  /// Member items of key-term k as (item, weight), ascending by item id.
  const std::vector<IdWeight>& items_of(int keyterm) const;

  /// Key-terms of one item as (keyterm, weight), ascending by key-term id.
  const std::vector<IdWeight>& keyterms_of(int item) const;

  /// All invariant violations, one message each; empty means valid.
  std::vector<std::string> validate() const;

 private:
  int num_items_ = 0;
  int num_keyterms_ = 0;
  std::vector<std::vector<IdWeight>> members_;    // per key-term: (item, w)
  std::vector<std::vector<IdWeight>> item_rows_;  // per item: (keyterm, w)
};

/// Divides each item row by its sum so rows sum to one.
/// Throws std::invalid_argument naming the item when a row is missing or
/// sums to zero, and when a key-term ends up with no members.
Catalog normalize_weights(int num_items, int num_keyterms,
                          const std::vector<CatalogEdge>& raw);

}  // namespace hierband
