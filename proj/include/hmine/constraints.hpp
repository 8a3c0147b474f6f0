#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmine/common.hpp"
#include "hmine/stream.hpp"
#include "hmine/taxonomy.hpp"

namespace hmine {

enum class Modifier { exact, ancestors, descendants };

struct Literal {
  ItemCode target;
  bool positive = true;
  Modifier modifier = Modifier::exact;
  friend bool operator==(const Literal&, const Literal&) = default;
};

using Disjunct = std::vector<Literal>;  // conjunction of literals

/// Boolean item constraint in disjunctive normal form.
struct ConstraintExpr {
  std::vector<Disjunct> disjuncts;
  friend bool operator==(const ConstraintExpr&, const ConstraintExpr&) = default;
};

/// Grammar: expr := conj ("|" conj)*; conj := prim ("&" prim)*;
/// prim := ["!"] atom | "(" expr ")"; atom := PATH | anc(PATH) | desc(PATH).
/// Parenthesised groups are distributed into DNF. Errors carry the offset.
ConstraintExpr parse_constraint(std::string_view text, const ClassificationTree& tree);
std::string to_string(const ConstraintExpr& b);

/// Whether `item` falls in the literal's target set (target itself plus
/// ancestors or descendants per the modifier). Polarity is ignored.
bool in_scope(const Literal& lit, const ItemCode& item);

bool satisfies(const Itemset& items, const ConstraintExpr& b, const ClassificationTree& tree);

struct SelectedItems {
  Itemset items;
  std::vector<std::string> warnings;
};

/// Smallest-support item set S such that every non-empty itemset drawn
/// from `universe` that satisfies `b` contains an item of S.
SelectedItems selected_items(const ConstraintExpr& b, const ClassificationTree& tree, const Itemset& universe,
                             const std::map<ItemCode, std::uint64_t>& supports);

enum class Strategy { selected, direct, discard };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

struct SupportEntry {
  std::uint64_t count = 0;
  bool frequent = false;  // part of the mined output, not just a helper subset
  friend bool operator==(const SupportEntry&, const SupportEntry&) = default;
};

struct SupportTable {
  std::uint64_t dataset_size = 0;
  std::map<Itemset, SupportEntry> entries;
  bool rule_complete = false;

  const SupportEntry* find(const Itemset& items) const;
  Rational support(const Itemset& items) const;

  friend bool operator==(const SupportTable&, const SupportTable&) = default;
};

struct MiningStats {
  std::uint64_t candidates = 0;  // itemsets whose support was counted, singletons included
  std::vector<std::uint64_t> candidates_per_level;
  std::uint64_t passes = 0;
  Itemset selected;  // the selected-items set, when that strategy ran
};

struct ConstrainedResult {
  SupportTable table;
  MiningStats stats;
};

/// Frequent itemsets that satisfy `b`, with exact counts.
ConstrainedResult mine_constrained(std::span<const Transaction> dataset, const ClassificationTree& tree,
                                   const ConstraintExpr& b, Rational minsup, Strategy strategy);

/// Plain level-wise mining of every frequent itemset.
ConstrainedResult mine_frequent(std::span<const Transaction> dataset, Rational minsup);

/// Adds exact counts for every missing subset of each frequent entry, in one extra scan.
SupportTable complete_subset_supports(std::span<const Transaction> dataset, SupportTable table,
                                      std::uint64_t* counted = nullptr);

} // namespace hmine
