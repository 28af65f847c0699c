#include <doctest.h>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hierband/catalog.hpp"

using hierband::Catalog;
using hierband::CatalogEdge;
using hierband::IdWeight;
using hierband::normalize_weights;

namespace {

bool mentions(const std::vector<std::string>& report, const std::string& text) {
  for (const auto& line : report)
    if (line.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("valid binary catalog produces an empty report") {
  Catalog catalog(2, 1, {{0, 0, 1.0}, {1, 0, 1.0}});
  CHECK(catalog.validate().empty());
  CHECK(catalog.num_items() == 2);
  CHECK(catalog.num_keyterms() == 1);
}

TEST_CASE("row-sum violation is reported with the item id") {
  Catalog catalog(1, 1, {{0, 0, 0.5}});
  auto report = catalog.validate();
  CHECK(mentions(report, "row-sum violation item 0"));
}

TEST_CASE("declared key-term without members is reported") {
  Catalog catalog(1, 2, {{0, 0, 1.0}});
  auto report = catalog.validate();
  CHECK(mentions(report, "empty key-term 1"));
}

TEST_CASE("item with no memberships is reported") {
  Catalog catalog(2, 1, {{0, 0, 1.0}});
  CHECK(mentions(catalog.validate(), "empty item 1"));
}

TEST_CASE("negative weights are reported") {
  Catalog catalog(1, 2, {{0, 0, 1.5}, {0, 1, -0.5}});
  CHECK(mentions(catalog.validate(), "negative weight item 0 key-term 1"));
}

TEST_CASE("members are listed in ascending item order") {
  // Ten items under one key-term, inserted in reverse.
  std::vector<CatalogEdge> edges;
  for (int i = 9; i >= 0; --i) edges.push_back({i, 0, 1.0});
  Catalog catalog(10, 1, edges);
  const auto& members = catalog.items_of(0);
  REQUIRE(members.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(members[static_cast<std::size_t>(i)].id == i);
    CHECK(members[static_cast<std::size_t>(i)].weight == 1.0);
  }
}

TEST_CASE("singleton membership") {
  Catalog catalog(1, 1, {{0, 0, 1.0}});
  CHECK(catalog.items_of(0) == std::vector<IdWeight>{{0, 1.0}});
}

TEST_CASE("weighted memberships read back exactly") {
  Catalog catalog(1, 2, {{0, 0, 0.3}, {0, 1, 0.7}});
  CHECK(catalog.items_of(1) == std::vector<IdWeight>{{0, 0.7}});
  CHECK(catalog.weight(0, 0) == 0.3);
  CHECK(catalog.weight(0, 1) == 0.7);
  CHECK(catalog.validate().empty());
}

TEST_CASE("weight is zero for non-members") {
  Catalog catalog(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  CHECK(catalog.weight(0, 1) == 0.0);
  CHECK(catalog.weight(1, 0) == 0.0);
}

TEST_CASE("out-of-range queries are rejected") {
  Catalog catalog(1, 1, {{0, 0, 1.0}});
  CHECK_THROWS_AS(catalog.items_of(1), std::invalid_argument);
  CHECK_THROWS_AS(catalog.items_of(-1), std::invalid_argument);
  CHECK_THROWS_AS(catalog.keyterms_of(5), std::invalid_argument);
  CHECK_THROWS_AS(catalog.weight(0, 3), std::invalid_argument);
}

TEST_CASE("bad construction inputs are rejected") {
  CHECK_THROWS_AS((Catalog(1, 1, {{1, 0, 1.0}})), std::invalid_argument);
  CHECK_THROWS_AS((Catalog(1, 1, {{0, 2, 1.0}})), std::invalid_argument);
  CHECK_THROWS_AS((Catalog(1, 1, {{0, 0, 0.5}, {0, 0, 0.5}})),
                  std::invalid_argument);
}

TEST_CASE("normalization splits symmetric rows evenly") {
  Catalog catalog = normalize_weights(1, 2, {{0, 0, 2.0}, {0, 1, 2.0}});
  CHECK(catalog.weight(0, 0) == 0.5);
  CHECK(catalog.weight(0, 1) == 0.5);
}

TEST_CASE("normalization leaves unit rows unchanged") {
  Catalog catalog = normalize_weights(1, 1, {{0, 0, 1.0}});
  CHECK(catalog.weight(0, 0) == 1.0);
}

TEST_CASE("normalization divides by the row sum") {
  Catalog catalog = normalize_weights(1, 2, {{0, 0, 1.0}, {0, 1, 3.0}});
  CHECK(catalog.weight(0, 0) == 0.25);
  CHECK(catalog.weight(0, 1) == 0.75);
  CHECK(catalog.validate().empty());
}

TEST_CASE("normalization is idempotent") {
  std::vector<CatalogEdge> raw = {
      {0, 0, 1.0}, {0, 1, 3.0}, {1, 1, 2.5}, {2, 0, 0.1}, {2, 2, 0.9}};
  Catalog once = normalize_weights(3, 3, raw);
  std::vector<CatalogEdge> again;
  for (int a = 0; a < once.num_items(); ++a)
    for (const auto& e : once.keyterms_of(a)) again.push_back({a, e.id, e.weight});
  Catalog twice = normalize_weights(3, 3, again);
  for (int a = 0; a < once.num_items(); ++a)
    for (int k = 0; k < once.num_keyterms(); ++k)
      CHECK(std::abs(once.weight(a, k) - twice.weight(a, k)) <= 1e-12);
}

TEST_CASE("normalization rejects degenerate inputs") {
  CHECK_THROWS_AS((normalize_weights(1, 1, {{0, 0, -1.0}})),
                  std::invalid_argument);
  CHECK_THROWS_AS((normalize_weights(2, 1, {{0, 0, 1.0}})),
                  std::invalid_argument);  // item 1 has no weights
  CHECK_THROWS_AS((normalize_weights(1, 2, {{0, 0, 1.0}})),
                  std::invalid_argument);  // key-term 1 ends up empty
}

TEST_CASE("membership union covers all items") {
  std::vector<CatalogEdge> raw = {
      {0, 0, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}, {2, 1, 4.0}, {3, 2, 2.0}};
  Catalog catalog = normalize_weights(4, 3, raw);
  std::set<int> covered;
  for (int k = 0; k < catalog.num_keyterms(); ++k)
    for (const auto& member : catalog.items_of(k)) covered.insert(member.id);
  CHECK(covered.size() == 4);
  // An item under m categories carries weight 1/m to each.
  CHECK(catalog.weight(1, 0) == 0.5);
  CHECK(catalog.weight(1, 1) == 0.5);
}

TEST_CASE("listed weights match stored weights") {
  Catalog catalog =
      normalize_weights(3, 2, {{0, 0, 3.0}, {0, 1, 1.0}, {1, 1, 2.0}, {2, 0, 5.0}});
  for (int k = 0; k < catalog.num_keyterms(); ++k)
    for (const auto& member : catalog.items_of(k))
      CHECK(member.weight == catalog.weight(member.id, k));
}
