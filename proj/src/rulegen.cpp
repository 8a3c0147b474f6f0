#include "hmine/rulegen.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <tuple>

namespace hmine {

bool canonical_less(const AssociationRule& a, const AssociationRule& b) {
  return std::tie(a.parent_class, a.antecedent_mask, a.consequent_mask, a.antecedent, a.consequent) <
         std::tie(b.parent_class, b.antecedent_mask, b.consequent_mask, b.antecedent, b.consequent);
}

namespace {

void check_threshold(Rational r, const char* name) {
  if (!is_probability(r))
    throw std::invalid_argument(std::string(name) + " must be in (0, 1]");
}

Itemset children_of(const InterestClass& cls, Mask mask) {
  Itemset out;
  for (unsigned b = 0; b < cls.child_count; ++b)
    if (mask >> b & 1)
      out.push_back(cls.children[b]);
  return out;
}

std::vector<AssociationRule> table_rules(const SupportTable& table, Rational minconf,
                                         const std::function<bool(const Itemset&)>& keep) {
  check_threshold(minconf, "minconf");
  std::vector<AssociationRule> rules;
  for (const auto& [items, entry] : table.entries) {
    if (!entry.frequent || items.size() < 2 || !keep(items))
      continue;
    Mask full = (Mask{1} << items.size()) - 1;
    for (Mask x = 1; x < full; ++x) {
      AssociationRule r;
      for (std::size_t j = 0; j < items.size(); ++j)
        (x >> j & 1 ? r.antecedent : r.consequent).push_back(items[j]);
      auto ante = table.find(r.antecedent);
      if (!ante)
        throw std::invalid_argument("incomplete support table: missing {" + to_string(r.antecedent) + "}");
      r.support_count = entry.count;
      r.antecedent_count = ante->count;
      r.n = table.dataset_size;
      if (meets(r.support_count, r.antecedent_count, minconf))
        rules.push_back(std::move(r));
    }
  }
  std::sort(rules.begin(), rules.end(), canonical_less);
  return rules;
}

} // namespace

std::vector<AssociationRule> rules_from_class(const StreamState& state, const ItemCode& cls, Rational minsup,
                                              Rational minconf) {
  check_threshold(minsup, "minsup");
  check_threshold(minconf, "minconf");
  auto k = state.class_index(cls);
  const auto& ic = state.sic()[k];
  std::vector<AssociationRule> rules;
  if (state.n() == 0)
    return rules;
  auto sums = state.superset_counts(k);
  for (Mask f = 1; f < sums.size(); ++f) {
    if (std::popcount(f) < 2 || !meets(sums[f], state.n(), minsup))
      continue;
    // every non-empty proper subset of f as antecedent
    for (Mask x = (f - 1) & f; x; x = (x - 1) & f) {
      if (!meets(sums[f], sums[x], minconf))
        continue;
      AssociationRule r;
      r.parent_class = ic.code;
      r.antecedent_mask = x;
      r.consequent_mask = f & ~x;
      r.antecedent = children_of(ic, x);
      r.consequent = children_of(ic, f & ~x);
      r.support_count = sums[f];
      r.antecedent_count = sums[x];
      r.n = state.n();
      rules.push_back(std::move(r));
    }
  }
  std::sort(rules.begin(), rules.end(), canonical_less);
  return rules;
}

std::vector<AssociationRule> rules_from_table(const SupportTable& table, Rational minconf) {
  return table_rules(table, minconf, [](const Itemset&) { return true; });
}

std::vector<AssociationRule> rules_from_table(const SupportTable& table, Rational minconf, const ConstraintExpr& b,
                                              const ClassificationTree& tree) {
  return table_rules(table, minconf, [&](const Itemset& items) { return satisfies(items, b, tree); });
}

bool covers(const AssociationRule& general, const AssociationRule& specific) {
  if (general.parent_class != specific.parent_class)
    return false;
  if (general.support() != specific.support() || general.confidence() != specific.confidence())
    return false;
  return std::includes(specific.antecedent.begin(), specific.antecedent.end(), general.antecedent.begin(),
                       general.antecedent.end()) &&
         std::includes(general.consequent.begin(), general.consequent.end(), specific.consequent.begin(),
                       specific.consequent.end());
}

std::vector<AssociationRule> prune_redundant(const std::vector<AssociationRule>& rules) {
  std::vector<AssociationRule> kept;
  for (const auto& r : rules) {
    bool redundant = std::any_of(rules.begin(), rules.end(), [&](const AssociationRule& other) {
      return (other.antecedent != r.antecedent || other.consequent != r.consequent) && covers(other, r);
    });
    if (!redundant)
      kept.push_back(r);
  }
  return kept;
}

} // namespace hmine
