#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hmine/taxonomy.hpp"

using namespace hmine;

namespace {

std::string random_tree_text(std::mt19937_64& rng, unsigned max_children, unsigned max_depth) {
  std::string out;
  std::vector<std::string> frontier{""};
  for (unsigned d = 1; d <= max_depth; ++d) {
    std::vector<std::string> next;
    for (const auto& p : frontier) {
      auto kids = rng() % (max_children + 1);
      for (unsigned i = 0; i < kids; ++i) {
        auto idx = std::to_string(i * 2 + rng() % 2);  // ragged, gapped indices
        auto path = p.empty() ? idx : p + "." + idx;
        out += path + "\tL" + path + "\n";
        next.push_back(path);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

} // namespace

TEST_CASE("parse_taxonomy builds nodes from paths and labels") {
  auto t = parse_taxonomy("0\tA\n1\tB\nA.0\tA0\nA.1\tA1\n");
  CHECK(t.size() == 4);
  CHECK(t.depth() == 2);
  CHECK(t.top_level().size() == 2);
  CHECK(t.label(ItemCode{0, 1}) == "A1");

  auto clothing = parse_taxonomy(fixtures::kClothing);
  CHECK(clothing.size() == 7);
  CHECK(clothing.depth() == 3);
  CHECK(clothing.top_level().size() == 2);
  CHECK(clothing.resolve("HikingBoots") == ItemCode{1, 1});
  CHECK(clothing.resolve("Clothes.Outerwear.1") == ItemCode{0, 0, 1});
}

TEST_CASE("parse_taxonomy reports errors with line numbers") {
  auto fails_with = [](const char* text, const char* needle, std::size_t line, unsigned fanout = 16) {
    try {
      parse_taxonomy(text, fanout);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
      CHECK(e.line() == line);
    }
  };
  fails_with("0\tA\nA.5\tz\n", "index exceeds fanout", 2, 4);
  fails_with("0\tA\n0\tB\n", "duplicate path", 2);
  fails_with("0\tA\n1.0\tB\n", "missing parent", 2);
  fails_with("0\tA\n\n0.x\tB\n", "malformed path", 3);
  fails_with("0 A\n", "malformed line", 1);
  fails_with("0\tA\n0.0\tB\n0.1\tB\n", "duplicate sibling label", 3);
}

TEST_CASE("ancestors and is_descendant") {
  auto t = parse_taxonomy(fixtures::balanced_tree_text(3, 3));
  CHECK(ancestors(t, ItemCode{0, 1, 2}) == std::vector<ItemCode>{{0, 1}, {0}});
  CHECK(ancestors(t, ItemCode{0}).empty());
  CHECK(is_descendant(t, ItemCode{0, 1, 2}, ItemCode{0, 1}));
  CHECK_FALSE(is_descendant(t, ItemCode{0, 1}, ItemCode{0, 1}));
  CHECK_FALSE(is_descendant(t, ItemCode{1, 0}, ItemCode{0}));
  CHECK_THROWS_AS(ancestors(t, ItemCode{7}), DataError);
  CHECK_THROWS_AS(is_descendant(t, ItemCode{0}, ItemCode{9}), DataError);

  auto c = parse_taxonomy(fixtures::kClothing);
  CHECK(ancestors(c, c.resolve("HikingBoots")) == std::vector<ItemCode>{c.resolve("Footwear")});
}

TEST_CASE("dit and noc") {
  auto t = parse_taxonomy(fixtures::balanced_tree_text(4, 3));
  CHECK(dit(t, ItemCode{0}) == 0);
  CHECK(dit(t, ItemCode{0, 1, 2}) == 2);
  CHECK(noc(t, ItemCode{0, 1, 2}) == 0);
  CHECK(noc(t, ItemCode{2}) == 4);
  CHECK_THROWS_AS(dit(t, ItemCode{0, 9}), DataError);

  // four levels of classification: leaf items sit at DIT 3
  auto four = parse_taxonomy(fixtures::balanced_tree_text(2, 4));
  for (const auto& leaf : four.leaves())
    CHECK(dit(four, leaf) == 3);

  auto c = parse_taxonomy(fixtures::kClothing);
  CHECK(noc(c, c.resolve("Footwear")) == 2);
}

TEST_CASE("metrics_report aggregates") {
  auto star = parse_taxonomy("0\tR\n0.0\ta\n0.1\tb\n0.2\tc\n");
  auto r = metrics_report(star);
  CHECK(r.max_dit == 1);
  CHECK(r.max_noc == 3);
  CHECK(r.mean_dit == Rational(3, 4));
  CHECK(std::none_of(r.nodes.begin(), r.nodes.end(), [](const NodeMetrics& m) { return m.flagged; }));

  auto empty = metrics_report(ClassificationTree{});
  CHECK(empty.nodes.empty());
  CHECK(empty.max_dit == 0);
  CHECK(empty.max_noc == 0);
  CHECK(empty.mean_dit == Rational(0));

  auto clothing = metrics_report(parse_taxonomy(fixtures::kClothing), 1);
  CHECK(clothing.max_dit == 2);
  for (const auto& m : clothing.nodes)
    CHECK(m.flagged == (m.dit >= 1));
}

TEST_CASE("tree invariants hold on random ragged trees") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 60; ++iter) {
    auto text = random_tree_text(rng, 4, 4);
    auto t = parse_taxonomy(text);
    int noc_sum = 0;
    for (const auto& code : t.codes()) {
      noc_sum += noc(t, code);
      CHECK(ancestors(t, code).size() == static_cast<std::size_t>(dit(t, code)));
      if (code.depth() > 1)
        CHECK(dit(t, code) == dit(t, code.parent()) + 1);
      for (const auto& other : t.codes())
        if (is_descendant(t, code, other))
          CHECK(dit(t, code) > dit(t, other));
    }
    CHECK(noc_sum == static_cast<int>(t.size() - t.top_level().size()));
    auto again = parse_taxonomy(serialize_taxonomy(t));
    CHECK(again == t);
    CHECK(serialize_taxonomy(again) == serialize_taxonomy(t));
  }
}

TEST_CASE("balanced tree identity for noc") {
  auto t = parse_taxonomy(fixtures::balanced_tree_text(2, 3));
  auto r = metrics_report(t);
  int sum = 0;
  for (const auto& m : r.nodes)
    sum += m.noc;
  CHECK(sum == 14 - 2);
}
