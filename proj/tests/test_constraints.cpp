#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hmine/constraints.hpp"
#include "oracles.hpp"

using namespace hmine;

namespace {

const char* kTwoGroups = "0\tG\n0.0\tg0\n0.1\tg1\n0.2\tg2\n0.3\tg3\n1\tH\n1.0\th0\n1.1\th1\n1.2\th2\n1.3\th3\n";

std::vector<Transaction> five(const ClassificationTree& t) {
  return parse_transactions("1,2,3\n1,2\n3,4\n1,3\n2,3,5\n", t);
}

Itemset items(const ClassificationTree& t, std::initializer_list<const char*> refs) {
  Itemset out;
  for (auto r : refs)
    out.push_back(t.resolve(r));
  std::sort(out.begin(), out.end());
  return out;
}

ConstraintExpr random_constraint(const ClassificationTree& t, std::mt19937_64& rng, std::size_t max_disj,
                                 std::size_t max_lits) {
  auto nodes = t.codes();
  ConstraintExpr b;
  auto nd = 1 + rng() % max_disj;
  for (std::size_t d = 0; d < nd; ++d) {
    Disjunct dj;
    auto nl = 1 + rng() % max_lits;
    for (std::size_t l = 0; l < nl; ++l) {
      Literal lit;
      lit.target = nodes[rng() % nodes.size()];
      lit.positive = rng() % 3 != 0;
      lit.modifier = static_cast<Modifier>(rng() % 3);
      dj.push_back(lit);
    }
    b.disjuncts.push_back(std::move(dj));
  }
  return b;
}

std::vector<Transaction> random_dataset(const Itemset& universe, std::size_t max_tx, std::mt19937_64& rng) {
  std::vector<Transaction> out;
  auto n = 1 + rng() % max_tx;
  for (std::size_t i = 0; i < n; ++i) {
    Transaction tx;
    tx.seq = i;
    for (const auto& u : universe)
      if (rng() % 100 < 40)
        tx.items.push_back(u);
    out.push_back(std::move(tx));
  }
  return out;
}

} // namespace

TEST_CASE("parse_constraint") {
  auto flat = parse_taxonomy(fixtures::kFlatFive);
  auto b = parse_constraint("1 & 2 | 3", flat);
  REQUIRE(b.disjuncts.size() == 2);
  CHECK(b.disjuncts[0] == Disjunct{Literal{{1}}, Literal{{2}}});
  CHECK(b.disjuncts[1] == Disjunct{Literal{{3}}});
  CHECK(to_string(b) == "1 & 2 | 3");

  auto clothing = parse_taxonomy(fixtures::kClothing);
  auto c = parse_constraint("desc(Clothes) & !anc(HikingBoots)", clothing);
  REQUIRE(c.disjuncts.size() == 1);
  CHECK(c.disjuncts[0] ==
        Disjunct{Literal{{0}, true, Modifier::descendants}, Literal{{1, 1}, false, Modifier::ancestors}});

  auto grouped = parse_constraint("(Jackets & Shoes) | (desc(Clothes) & !anc(HikingBoots))", clothing);
  CHECK(grouped.disjuncts.size() == 2);
  auto distributed = parse_constraint("(1 | 2) & 3", flat);
  CHECK(to_string(distributed) == "1 & 3 | 2 & 3");

  try {
    parse_constraint("1 & & 2", flat);
    FAIL("expected syntax error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_WITH_AS(parse_constraint("1 & 9", flat), doctest::Contains("unknown item"), ParseError);
  CHECK_THROWS_AS(parse_constraint("!(1 & 2)", flat), ParseError);
  CHECK_THROWS_AS(parse_constraint("1 2", flat), ParseError);
  CHECK_THROWS_AS(parse_constraint("(1 | 2", flat), ParseError);
  CHECK_THROWS_AS(parse_constraint("", flat), ParseError);
}

TEST_CASE("satisfies") {
  auto c = parse_taxonomy(fixtures::kClothing);
  auto both = parse_constraint("Jackets & Shoes", c);
  CHECK(satisfies(items(c, {"Jackets", "Shoes"}), both, c));
  CHECK_FALSE(satisfies(items(c, {"Jackets"}), both, c));

  auto rule = parse_constraint("desc(Clothes) & !anc(HikingBoots)", c);
  CHECK(satisfies(items(c, {"Jackets"}), rule, c));
  CHECK(satisfies(items(c, {"Clothes"}), rule, c));
  CHECK_FALSE(satisfies(items(c, {"Jackets", "Footwear"}), rule, c));
  CHECK_FALSE(satisfies(items(c, {"Jackets", "HikingBoots"}), rule, c));
  CHECK(satisfies(items(c, {"Jackets", "Shoes"}), rule, c));
  CHECK_FALSE(satisfies({}, rule, c));
  CHECK_FALSE(satisfies({}, both, c));
  CHECK(satisfies({}, parse_constraint("!Shoes", c), c));
}

TEST_CASE("selected_items reproduces the worked examples") {
  auto flat = parse_taxonomy(fixtures::kFlatFive);
  auto universe = flat.leaves();
  std::map<ItemCode, std::uint64_t> uniform;
  for (const auto& u : universe)
    uniform[u] = 1;

  auto s1 = selected_items(parse_constraint("1 & 2 | 3", flat), flat, universe, uniform);
  CHECK(s1.items == items(flat, {"1", "3"}));
  auto s2 = selected_items(parse_constraint("1 & 2 | !3", flat), flat, universe, uniform);
  CHECK(s2.items == items(flat, {"1", "2", "4", "5"}));
  auto s3 = selected_items(parse_constraint("3", flat), flat, universe, uniform);
  CHECK(s3.items == items(flat, {"3"}));

  // supports steer the choice
  auto skewed = uniform;
  skewed[ItemCode{1}] = 10;
  CHECK(selected_items(parse_constraint("1 & 2 | 3", flat), flat, universe, skewed).items == items(flat, {"2", "3"}));

  auto neg = selected_items(parse_constraint("!3", flat), flat, universe, uniform);
  CHECK(neg.warnings.size() == 1);
  CHECK_THROWS_AS(selected_items(parse_constraint("3", flat), flat, universe, {}), std::invalid_argument);
}

TEST_CASE("cover property holds exhaustively on random constraints") {
  auto t = parse_taxonomy(kTwoGroups);
  auto universe = t.leaves();
  REQUIRE(universe.size() == 8);
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 150; ++iter) {
    auto b = random_constraint(t, rng, 3, 3);
    std::map<ItemCode, std::uint64_t> supports;
    for (const auto& u : universe)
      supports[u] = rng() % 10;
    auto s = selected_items(b, t, universe, supports);
    for (Mask m = 1; m < 256; ++m) {
      Itemset x;
      for (unsigned j = 0; j < 8; ++j)
        if (m >> j & 1)
          x.push_back(universe[j]);
      if (satisfies(x, b, t)) {
        Itemset common;
        std::set_intersection(x.begin(), x.end(), s.items.begin(), s.items.end(), std::back_inserter(common));
        CHECK(!common.empty());
      }
    }
  }
}

TEST_CASE("mine_constrained on the five-transaction fixture") {
  auto flat = parse_taxonomy(fixtures::kFlatFive);
  auto data = five(flat);
  auto b3 = parse_constraint("3", flat);
  for (auto strategy : {Strategy::selected, Strategy::direct, Strategy::discard}) {
    CAPTURE(to_string(strategy));
    auto r = mine_constrained(data, flat, b3, parse_rational("0.4"), strategy);
    CHECK(r.table.dataset_size == 5);
    REQUIRE(r.table.entries.size() == 3);
    CHECK(r.table.entries.at(items(flat, {"3"})).count == 4);
    CHECK(r.table.entries.at(items(flat, {"1", "3"})).count == 2);
    CHECK(r.table.entries.at(items(flat, {"2", "3"})).count == 2);

    // frozen values agree with exhaustive enumeration
    auto expected = oracle::enumerate_frequent(data, 2, 5, [&](const Itemset& s) { return satisfies(s, b3, flat); });
    CHECK(expected.size() == 3);
    for (const auto& [s, c] : expected)
      CHECK(r.table.entries.at(s).count == c);

    auto r12 = mine_constrained(data, flat, parse_constraint("1 & 2", flat), parse_rational("0.4"), strategy);
    REQUIRE(r12.table.entries.size() == 1);
    CHECK(r12.table.entries.at(items(flat, {"1", "2"})).count == 2);
  }
  auto sel = mine_constrained(data, flat, b3, parse_rational("0.4"), Strategy::selected);
  auto dis = mine_constrained(data, flat, b3, parse_rational("0.4"), Strategy::discard);
  CHECK(sel.stats.selected == items(flat, {"3"}));
  CHECK(sel.stats.candidates <= dis.stats.candidates);

  CHECK_THROWS_AS(mine_constrained(data, flat, b3, Rational(0), Strategy::direct), std::invalid_argument);
  CHECK_THROWS_AS(mine_constrained({}, flat, b3, Rational(1, 2), Strategy::direct), std::invalid_argument);
}

TEST_CASE("discard with a tautology equals plain mining") {
  auto flat = parse_taxonomy(fixtures::kFlatFive);
  auto data = five(flat);
  auto anything = parse_constraint("desc(1) | desc(2) | desc(3) | desc(4) | desc(5)", flat);
  auto constrained = mine_constrained(data, flat, anything, Rational(1, 5), Strategy::discard);
  auto plain = mine_frequent(data, Rational(1, 5));
  CHECK(constrained.table == plain.table);
}

TEST_CASE("strategies agree with post-filtered mining on random instances") {
  auto t = parse_taxonomy(kTwoGroups);
  auto universe = t.leaves();
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 80; ++iter) {
    auto data = random_dataset(universe, 64, rng);
    auto b = random_constraint(t, rng, 3, 3);
    Rational minsup(1 + static_cast<std::int64_t>(rng() % 4), 10);
    auto plain = mine_frequent(data, minsup);
    SupportTable filtered{plain.table.dataset_size, {}, false};
    for (const auto& [s, e] : plain.table.entries)
      if (satisfies(s, b, t))
        filtered.entries.emplace(s, e);
    for (auto strategy : {Strategy::selected, Strategy::direct, Strategy::discard}) {
      auto r = mine_constrained(data, t, b, minsup, strategy);
      CHECK(r.table == filtered);
    }
  }
}

TEST_CASE("complete_subset_supports") {
  auto flat = parse_taxonomy(fixtures::kFlatFive);
  auto data = five(flat);
  auto r = mine_constrained(data, flat, parse_constraint("3", flat), parse_rational("0.4"), Strategy::selected);
  CHECK_FALSE(r.table.rule_complete);
  std::uint64_t counted = 0;
  auto done = complete_subset_supports(data, r.table, &counted);
  CHECK(counted == 2);
  CHECK(done.rule_complete);
  REQUIRE(done.entries.size() == 5);
  CHECK(done.entries.at(items(flat, {"1"})) == SupportEntry{3, false});
  CHECK(done.entries.at(items(flat, {"2"})) == SupportEntry{3, false});
  for (const auto& [s, e] : done.entries)
    CHECK(e.count == oracle::count_itemset(data, s));

  auto singles = mine_constrained(data, flat, parse_constraint("1 | 2 | 3", flat), Rational(3, 5), Strategy::direct);
  CHECK(complete_subset_supports(data, singles.table, &counted).entries == singles.table.entries);
  CHECK(counted == 0);
}
