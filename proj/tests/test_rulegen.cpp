#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hmine/rulegen.hpp"
#include "oracles.hpp"

using namespace hmine;

namespace {

StreamState stream_of(std::shared_ptr<const ClassificationTree> t, const char* lines) {
  StreamState s(t, std::vector<ItemCode>{{0}});
  for (const auto& tx : parse_transactions(lines, *t))
    s.process_mhorm(tx);
  return s;
}

const AssociationRule* find_rule(const std::vector<AssociationRule>& rules, const Itemset& x, const Itemset& y) {
  for (const auto& r : rules)
    if (r.antecedent == x && r.consequent == y)
      return &r;
  return nullptr;
}

} // namespace

TEST_CASE("rules_from_class on the four-transaction fixture") {
  auto t = fixtures::tree(fixtures::kClassA);
  auto s = stream_of(t, "A1,A2\nA1\nA1,A2,A3\n\n");
  auto rules = rules_from_class(s, ItemCode{0}, Rational(1, 2), Rational(1, 2));
  REQUIRE(rules.size() == 2);
  // canonical order: antecedent mask first
  CHECK(rules[0].antecedent == Itemset{{0, 0}});
  CHECK(rules[0].consequent == Itemset{{0, 1}});
  CHECK(rules[0].support() == Rational(2, 4));
  CHECK(rules[0].confidence() == Rational(2, 3));
  CHECK(rules[1].antecedent == Itemset{{0, 1}});
  CHECK(rules[1].confidence() == Rational(1));
  CHECK(rules[1].parent_class == ItemCode{0});

  auto strict = rules_from_class(s, ItemCode{0}, Rational(1, 2), Rational(1));
  REQUIRE(strict.size() == 1);
  CHECK(strict[0].antecedent_mask == 0b10);
  CHECK_THROWS_AS(rules_from_class(s, ItemCode{0, 1}, Rational(1, 2), Rational(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(rules_from_class(s, ItemCode{0}, Rational(0), Rational(1, 2)), std::invalid_argument);
}

TEST_CASE("rules_from_table needs a completed table") {
  auto flat = parse_taxonomy(fixtures::kFlatFive);
  auto data = parse_transactions("1,2,3\n1,2\n3,4\n1,3\n2,3,5\n", flat);
  auto b = parse_constraint("3", flat);
  auto phase1 = mine_constrained(data, flat, b, parse_rational("0.4"), Strategy::direct);
  CHECK_THROWS_WITH_AS(rules_from_table(phase1.table, parse_rational("0.6")),
                       doctest::Contains("incomplete support table"), std::invalid_argument);

  auto table = complete_subset_supports(data, phase1.table);
  auto rules = rules_from_table(table, parse_rational("0.6"), b, flat);
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].antecedent == Itemset{{1}});
  CHECK(rules[0].consequent == Itemset{{3}});
  CHECK(rules[0].confidence() == Rational(2, 3));
  CHECK(rules[1].antecedent == Itemset{{2}});
  CHECK(rules[1].confidence() == Rational(2, 3));
  CHECK(rules_from_table(table, Rational(1)).empty());

  auto lower = rules_from_table(table, parse_rational("0.5"));
  CHECK(lower.size() == 4);
  for (const auto& r : lower)
    CHECK(r.support_count == oracle::count_itemset(data, [&] {
            Itemset u = r.antecedent;
            u.insert(u.end(), r.consequent.begin(), r.consequent.end());
            std::sort(u.begin(), u.end());
            return u;
          }()));
}

TEST_CASE("prune_redundant keeps the minimal-antecedent rule") {
  auto t = fixtures::tree(fixtures::kClassA);
  // every transaction with A1 also has A2 and A3
  auto s = stream_of(t, "A1,A2,A3\nA1,A2,A3\nA2,A3\nA2\nA4\n");
  auto rules = rules_from_class(s, ItemCode{0}, Rational(1, 5), Rational(1, 5));
  auto specific = find_rule(rules, Itemset{{0, 0}, {0, 1}}, Itemset{{0, 2}});
  auto general = find_rule(rules, Itemset{{0, 0}}, Itemset{{0, 1}, {0, 2}});
  REQUIRE(specific);
  REQUIRE(general);
  CHECK(specific->support() == general->support());
  CHECK(specific->confidence() == general->confidence());
  CHECK(specific->support() == Rational(2, 5));

  auto kept = prune_redundant(rules);
  CHECK(find_rule(kept, general->antecedent, general->consequent));
  CHECK_FALSE(find_rule(kept, specific->antecedent, specific->consequent));

  AssociationRule lone = rules.front();
  CHECK(prune_redundant({lone}) == std::vector<AssociationRule>{lone});

  auto a = rules.front();
  auto b = a;
  b.antecedent_count += 1;
  b.antecedent.clear();
  CHECK(prune_redundant({a, b}).size() == 2);
}

TEST_CASE("class rules match a brute-force enumerator and pruning is lossless") {
  auto t = fixtures::tree(fixtures::balanced_tree_text(4, 2));
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    auto data = fixtures::random_stream(*t, 1 + rng() % 64, 6, rng);
    StreamState s(t, std::vector<ItemCode>{{1}});
    for (const auto& tx : data)
      s.process_horm(tx);
    Rational minsup(1 + static_cast<std::int64_t>(rng() % 5), 10);
    Rational minconf(1 + static_cast<std::int64_t>(rng() % 10), 10);
    auto rules = rules_from_class(s, ItemCode{1}, minsup, minconf);
    auto children = t->children(ItemCode{1});

    std::size_t expected = 0;
    for (Mask x = 1; x < 16; ++x)
      for (Mask y = 1; y < 16; ++y) {
        if (x & y)
          continue;
        std::vector<ItemCode> xs, xy;
        for (unsigned b = 0; b < 4; ++b) {
          if (x >> b & 1)
            xs.push_back(children[b]);
          if ((x | y) >> b & 1)
            xy.push_back(children[b]);
        }
        auto cxy = oracle::count_children(data, xy);
        auto cx = oracle::count_children(data, xs);
        bool valid = static_cast<std::int64_t>(cxy) * minsup.denominator() >=
                         minsup.numerator() * static_cast<std::int64_t>(data.size()) &&
                     static_cast<std::int64_t>(cxy) * minconf.denominator() >=
                         minconf.numerator() * static_cast<std::int64_t>(cx);
        if (!valid)
          continue;
        ++expected;
        Itemset yi;
        for (unsigned b = 0; b < 4; ++b)
          if (y >> b & 1)
            yi.push_back(children[b]);
        auto r = find_rule(rules, xs, yi);
        REQUIRE(r);
        CHECK(r->support_count == cxy);
        CHECK(r->antecedent_count == cx);
      }
    CHECK(rules.size() == expected);
    CHECK(std::is_sorted(rules.begin(), rules.end(), canonical_less));

    auto kept = prune_redundant(rules);
    for (const auto& r : rules) {
      bool ok = std::any_of(kept.begin(), kept.end(), [&](const AssociationRule& k) { return covers(k, r); });
      CHECK(ok);
    }
  }
}
