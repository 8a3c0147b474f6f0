#pragma once

#include <optional>
#include <vector>

#include "hmine/constraints.hpp"
#include "hmine/stream.hpp"

namespace hmine {

/// X => Y within one parent class (count-array rules) or one support table.
struct AssociationRule {
  std::optional<ItemCode> parent_class;
  Mask antecedent_mask = 0;  // set for count-array rules only
  Mask consequent_mask = 0;
  Itemset antecedent;
  Itemset consequent;
  std::uint64_t support_count = 0;     // transactions containing X and Y
  std::uint64_t antecedent_count = 0;  // transactions containing X
  std::uint64_t n = 0;

  Rational support() const { return Rational(static_cast<std::int64_t>(support_count), static_cast<std::int64_t>(n)); }
  Rational confidence() const {
    return Rational(static_cast<std::int64_t>(support_count), static_cast<std::int64_t>(antecedent_count));
  }

  friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

/// Canonical order: parent class, antecedent mask, consequent mask, then itemsets.
bool canonical_less(const AssociationRule& a, const AssociationRule& b);

std::vector<AssociationRule> rules_from_class(const StreamState& state, const ItemCode& cls, Rational minsup,
                                              Rational minconf);

/// Needs a rule-complete table. Throws std::invalid_argument("incomplete support table")
/// when a subset count is missing.
std::vector<AssociationRule> rules_from_table(const SupportTable& table, Rational minconf);
/// Only frequent itemsets satisfying `b` seed rules.
std::vector<AssociationRule> rules_from_table(const SupportTable& table, Rational minconf, const ConstraintExpr& b,
                                              const ClassificationTree& tree);

/// Whether `general` makes `specific` redundant: smaller-or-equal antecedent,
/// larger-or-equal consequent, identical support and confidence.
bool covers(const AssociationRule& general, const AssociationRule& specific);

/// Drops every rule covered by a different rule in the same set.
std::vector<AssociationRule> prune_redundant(const std::vector<AssociationRule>& rules);

} // namespace hmine
