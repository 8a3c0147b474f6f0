#include "hmine/constraints.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include <fmt/format.h>

namespace hmine {

namespace {

constexpr std::size_t kMaxDisjuncts = 4096;

bool is_ident_char(char c) {
  return c != ' ' && c != '\t' && c != '\r' && c != '\n' && c != '&' && c != '|' && c != '!' && c != '(' &&
         c != ')';
}

class ConstraintParser {
public:
  ConstraintParser(std::string_view text, const ClassificationTree& tree) : s_(text), tree_(tree) {}

  ConstraintExpr parse() {
    auto d = expr();
    skip_ws();
    if (pos_ != s_.size())
      fail(fmt::format("unexpected '{}'", s_[pos_]), pos_);
    return ConstraintExpr{std::move(d)};
  }

private:
  using Dnf = std::vector<Disjunct>;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError(fmt::format("constraint syntax error at offset {}: {}", at, msg), 0, at);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Dnf expr() {
    auto d = conj();
    while (accept('|')) {
      auto rhs = conj();
      d.insert(d.end(), rhs.begin(), rhs.end());
      if (d.size() > kMaxDisjuncts)
        fail("expression too large in disjunctive form", pos_);
    }
    return d;
  }

  Dnf conj() {
    auto d = prim();
    while (accept('&')) {
      auto rhs = prim();
      if (d.size() * rhs.size() > kMaxDisjuncts)
        fail("expression too large in disjunctive form", pos_);
      Dnf product;
      for (const auto& a : d)
        for (const auto& b : rhs) {
          auto merged = a;
          merged.insert(merged.end(), b.begin(), b.end());
          product.push_back(std::move(merged));
        }
      d = std::move(product);
    }
    return d;
  }

  Dnf prim() {
    skip_ws();
    if (accept('(')) {
      auto d = expr();
      if (!accept(')'))
        fail("expected ')'", pos_);
      return d;
    }
    bool positive = true;
    if (accept('!')) {
      positive = false;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(')
        fail("negation applies to single items only", pos_);
    }
    auto lit = atom();
    lit.positive = positive;
    return Dnf{Disjunct{lit}};
  }

  Literal atom() {
    skip_ws();
    auto start = pos_;
    while (pos_ < s_.size() && is_ident_char(s_[pos_]))
      ++pos_;
    if (pos_ == start)
      fail("expected item", start);
    auto ident = s_.substr(start, pos_ - start);
    Literal lit;
    if (ident == "anc" || ident == "desc") {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        lit.modifier = ident == "anc" ? Modifier::ancestors : Modifier::descendants;
        ++pos_;
        auto close = s_.find(')', pos_);
        if (close == std::string_view::npos)
          fail("expected ')'", s_.size());
        auto inner_start = pos_;
        auto inner = s_.substr(pos_, close - pos_);
        auto b = inner.find_first_not_of(" \t");
        auto e = inner.find_last_not_of(" \t");
        if (b == std::string_view::npos)
          fail("expected item", pos_);
        lit.target = resolve(inner.substr(b, e - b + 1), inner_start + b);
        pos_ = close + 1;
        return lit;
      }
    }
    lit.target = resolve(ident, start);
    return lit;
  }

  ItemCode resolve(std::string_view ref, std::size_t at) {
    try {
      return tree_.resolve(ref);
    } catch (const DataError&) {
      fail(fmt::format("unknown item '{}'", ref), at);
    }
  }

  std::string_view s_;
  const ClassificationTree& tree_;
  std::size_t pos_ = 0;
};

} // namespace

ConstraintExpr parse_constraint(std::string_view text, const ClassificationTree& tree) {
  return ConstraintParser(text, tree).parse();
}

std::string to_string(const ConstraintExpr& b) {
  std::vector<std::string> parts;
  for (const auto& d : b.disjuncts) {
    std::vector<std::string> lits;
    for (const auto& l : d) {
      auto target = l.target.str();
      if (l.modifier == Modifier::ancestors)
        target = "anc(" + target + ")";
      else if (l.modifier == Modifier::descendants)
        target = "desc(" + target + ")";
      lits.push_back((l.positive ? "" : "!") + target);
    }
    parts.push_back(fmt::format("{}", fmt::join(lits, " & ")));
  }
  return fmt::format("{}", fmt::join(parts, " | "));
}

bool in_scope(const Literal& lit, const ItemCode& item) {
  switch (lit.modifier) {
  case Modifier::exact:
    return item == lit.target;
  case Modifier::descendants:
    return lit.target.is_prefix_of(item);
  case Modifier::ancestors:
    return item.is_prefix_of(lit.target);
  }
  return false;
}

bool satisfies(const Itemset& items, const ConstraintExpr& b, const ClassificationTree& tree) {
  for (const auto& item : items)
    tree.node(item);
  for (const auto& d : b.disjuncts) {
    bool ok = std::all_of(d.begin(), d.end(), [&](const Literal& lit) {
      bool hit = std::any_of(items.begin(), items.end(), [&](const ItemCode& i) { return in_scope(lit, i); });
      return hit == lit.positive;
    });
    if (ok)
      return true;
  }
  return false;
}

SelectedItems selected_items(const ConstraintExpr& b, const ClassificationTree& tree, const Itemset& universe_in,
                             const std::map<ItemCode, std::uint64_t>& supports) {
  Itemset universe = universe_in;
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  for (const auto& u : universe) {
    tree.node(u);
    if (!supports.count(u))
      throw std::invalid_argument(fmt::format("no support given for item {}", u.str()));
  }

  SelectedItems result;
  // Per disjunct, the item sets a single literal can contribute.
  std::vector<std::vector<Itemset>> options;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < b.disjuncts.size(); ++i) {
    const auto& d = b.disjuncts[i];
    std::vector<Itemset> opts;
    bool all_negative = true;
    for (const auto& lit : d) {
      Itemset chosen;
      for (const auto& u : universe)
        if (in_scope(lit, u) == lit.positive)
          chosen.push_back(u);
      all_negative = all_negative && !lit.positive;
      opts.push_back(std::move(chosen));
    }
    if (all_negative)
      result.warnings.push_back(
          fmt::format("disjunct {} has only negative literals; selected items cover almost the whole universe", i + 1));
    combos *= std::max<std::size_t>(opts.size(), 1);
    if (combos > (std::size_t{1} << 22))
      throw std::invalid_argument("too many selected-item combinations to minimise exactly");
    options.push_back(std::move(opts));
  }

  auto cost = [&](const Itemset& s) {
    std::uint64_t total = 0;
    for (const auto& i : s)
      total += supports.at(i);
    return total;
  };

  std::vector<std::size_t> pick(options.size(), 0);
  std::optional<Itemset> best;
  std::uint64_t best_cost = 0;
  while (true) {
    Itemset s;
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i].empty())
        continue;
      Itemset merged;
      const auto& add = options[i][pick[i]];
      std::set_union(s.begin(), s.end(), add.begin(), add.end(), std::back_inserter(merged));
      s = std::move(merged);
    }
    auto c = cost(s);
    if (!best || c < best_cost || (c == best_cost && (s.size() < best->size() || (s.size() == best->size() && s < *best)))) {
      best = s;
      best_cost = c;
    }
    std::size_t i = 0;
    for (; i < options.size(); ++i) {
      if (options[i].empty())
        continue;
      if (++pick[i] < options[i].size())
        break;
      pick[i] = 0;
    }
    if (i == options.size())
      break;
  }
  result.items = best.value_or(Itemset{});
  return result;
}

std::string_view to_string(Strategy s) {
  switch (s) {
  case Strategy::selected:
    return "selected";
  case Strategy::direct:
    return "direct";
  case Strategy::discard:
    return "discard";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "selected")
    return Strategy::selected;
  if (text == "direct")
    return Strategy::direct;
  if (text == "discard")
    return Strategy::discard;
  throw std::invalid_argument(fmt::format("unknown strategy '{}'", text));
}

const SupportEntry* SupportTable::find(const Itemset& items) const {
  auto it = entries.find(items);
  return it == entries.end() ? nullptr : &it->second;
}

Rational SupportTable::support(const Itemset& items) const {
  auto e = find(items);
  if (!e)
    throw std::out_of_range(fmt::format("no support entry for {{{}}}", to_string(items)));
  return Rational(static_cast<std::int64_t>(e->count), static_cast<std::int64_t>(dataset_size));
}

namespace {

using Ids = std::vector<int>;

/// Dataset with items renumbered densely in path order.
struct Interned {
  std::vector<ItemCode> items;
  std::vector<std::vector<std::uint64_t>> bits;  // per transaction

  explicit Interned(std::span<const Transaction> dataset) {
    std::set<ItemCode> all;
    for (const auto& t : dataset)
      all.insert(t.items.begin(), t.items.end());
    items.assign(all.begin(), all.end());
    auto words = (items.size() + 63) / 64;
    for (const auto& t : dataset) {
      std::vector<std::uint64_t> b(words, 0);
      for (const auto& i : t.items) {
        auto id = id_of(i);
        b[id / 64] |= std::uint64_t{1} << (id % 64);
      }
      bits.push_back(std::move(b));
    }
  }

  std::size_t id_of(const ItemCode& code) const {
    return static_cast<std::size_t>(std::lower_bound(items.begin(), items.end(), code) - items.begin());
  }

  Itemset decode(const Ids& ids) const {
    Itemset out;
    for (auto i : ids)
      out.push_back(items[i]);
    return out;
  }

  static bool contains(const std::vector<std::uint64_t>& b, const Ids& ids) {
    return std::all_of(ids.begin(), ids.end(), [&](int i) { return (b[i / 64] >> (i % 64)) & 1; });
  }
};

/// Constraint evaluated over interned ids.
struct CompiledConstraint {
  struct Lit {
    std::vector<char> scope;
    bool positive;
  };
  std::vector<std::vector<Lit>> disjuncts;

  CompiledConstraint(const ConstraintExpr& b, const Interned& in) {
    for (const auto& d : b.disjuncts) {
      std::vector<Lit> lits;
      for (const auto& lit : d) {
        Lit l{std::vector<char>(in.items.size(), 0), lit.positive};
        for (std::size_t i = 0; i < in.items.size(); ++i)
          l.scope[i] = in_scope(lit, in.items[i]);
        lits.push_back(std::move(l));
      }
      disjuncts.push_back(std::move(lits));
    }
  }

  static bool hits(const Lit& l, const Ids& ids) {
    return std::any_of(ids.begin(), ids.end(), [&](int i) { return l.scope[i] != 0; });
  }

  bool satisfied(const Ids& ids) const {
    return std::any_of(disjuncts.begin(), disjuncts.end(), [&](const auto& d) {
      return std::all_of(d.begin(), d.end(), [&](const Lit& l) { return hits(l, ids) == l.positive; });
    });
  }

  /// Can `ids` grow into a satisfying set using only items of `extend` larger than its last item?
  bool feasible(const Ids& ids, const Ids& extend) const {
    auto first_ext = std::upper_bound(extend.begin(), extend.end(), ids.back());
    for (const auto& d : disjuncts) {
      bool ok = true;
      for (const auto& l : d)
        if (!l.positive && hits(l, ids)) {
          ok = false;
          break;
        }
      if (!ok)
        continue;
      for (const auto& l : d) {
        if (!l.positive || hits(l, ids))
          continue;
        bool addable = std::any_of(first_ext, extend.end(), [&](int e) {
          if (!l.scope[e])
            return false;
          return std::none_of(d.begin(), d.end(), [&](const Lit& n) { return !n.positive && n.scope[e]; });
        });
        if (!addable) {
          ok = false;
          break;
        }
      }
      if (ok)
        return true;
    }
    return false;
  }
};

void check_inputs(std::span<const Transaction> dataset, Rational minsup) {
  if (!is_probability(minsup))
    throw std::invalid_argument("minsup must be in (0, 1]");
  if (dataset.empty())
    throw std::invalid_argument("empty dataset");
}

/// Level-wise search that only counts candidates accepted by `tracked`; a
/// candidate survives only if every tracked subset one size smaller is frequent.
std::map<Ids, std::uint64_t> levelwise(const Interned& in, Rational minsup, const std::function<bool(const Ids&)>& tracked,
                                       MiningStats& stats, Ids* frequent_singletons = nullptr,
                                       const std::function<void(const std::vector<std::uint64_t>&)>& on_singletons = {}) {
  const auto n = in.bits.size();
  const auto u = in.items.size();
  std::map<Ids, std::uint64_t> found;

  std::vector<std::uint64_t> single(u, 0);
  for (const auto& b : in.bits)
    for (std::size_t i = 0; i < u; ++i)
      single[i] += (b[i / 64] >> (i % 64)) & 1;
  stats.candidates += u;
  stats.candidates_per_level.push_back(u);
  stats.passes = 1;

  Ids l1;
  for (std::size_t i = 0; i < u; ++i)
    if (meets(single[i], n, minsup)) {
      l1.push_back(static_cast<int>(i));
      found[{static_cast<int>(i)}] = single[i];
    }
  if (frequent_singletons)
    *frequent_singletons = l1;
  if (on_singletons)
    on_singletons(single);

  std::set<Ids> frontier;
  for (auto i : l1)
    if (tracked({i}))
      frontier.insert({i});

  for (std::size_t k = 2; !frontier.empty(); ++k) {
    std::set<Ids> candidates;
    for (const auto& f : frontier) {
      for (auto i : l1) {
        if (std::binary_search(f.begin(), f.end(), i))
          continue;
        Ids c = f;
        c.insert(std::upper_bound(c.begin(), c.end(), i), i);
        if (candidates.count(c) || !tracked(c))
          continue;
        bool pruned = false;
        for (std::size_t drop = 0; drop < c.size() && !pruned; ++drop) {
          Ids q = c;
          q.erase(q.begin() + static_cast<std::ptrdiff_t>(drop));
          pruned = tracked(q) && !frontier.count(q);
        }
        if (!pruned)
          candidates.insert(std::move(c));
      }
    }
    stats.candidates += candidates.size();
    stats.candidates_per_level.push_back(candidates.size());
    if (candidates.empty())
      break;
    ++stats.passes;

    std::vector<Ids> cands(candidates.begin(), candidates.end());
    std::vector<std::uint64_t> counts(cands.size(), 0);
    for (const auto& b : in.bits)
      for (std::size_t c = 0; c < cands.size(); ++c)
        counts[c] += Interned::contains(b, cands[c]);

    std::set<Ids> next;
    for (std::size_t c = 0; c < cands.size(); ++c)
      if (meets(counts[c], n, minsup)) {
        found[cands[c]] = counts[c];
        next.insert(cands[c]);
      }
    frontier = std::move(next);
  }
  return found;
}

} // namespace

ConstrainedResult mine_constrained(std::span<const Transaction> dataset, const ClassificationTree& tree,
                                   const ConstraintExpr& b, Rational minsup, Strategy strategy) {
  check_inputs(dataset, minsup);
  Interned in(dataset);
  CompiledConstraint cb(b, in);
  ConstrainedResult result;
  result.table.dataset_size = dataset.size();

  std::vector<char> selected(in.items.size(), 0);
  Ids l1;
  std::function<bool(const Ids&)> tracked;
  std::function<void(const std::vector<std::uint64_t>&)> on_singletons;

  switch (strategy) {
  case Strategy::discard:
    tracked = [](const Ids&) { return true; };
    break;
  case Strategy::selected:
    // S is chosen once singleton supports are known.
    on_singletons = [&](const std::vector<std::uint64_t>& single) {
      std::map<ItemCode, std::uint64_t> supports;
      for (std::size_t i = 0; i < in.items.size(); ++i)
        supports[in.items[i]] = single[i];
      auto s = selected_items(b, tree, in.items, supports);
      result.stats.selected = s.items;
      for (const auto& item : s.items)
        selected[in.id_of(item)] = 1;
    };
    tracked = [&](const Ids& c) { return std::any_of(c.begin(), c.end(), [&](int i) { return selected[i] != 0; }); };
    break;
  case Strategy::direct:
    tracked = [&](const Ids& c) { return cb.feasible(c, l1); };
    break;
  }

  auto found = levelwise(in, minsup, tracked, result.stats, &l1, on_singletons);
  for (const auto& [ids, count] : found)
    if (cb.satisfied(ids))
      result.table.entries.emplace(in.decode(ids), SupportEntry{count, true});
  return result;
}

ConstrainedResult mine_frequent(std::span<const Transaction> dataset, Rational minsup) {
  check_inputs(dataset, minsup);
  Interned in(dataset);
  ConstrainedResult result;
  result.table.dataset_size = dataset.size();
  auto found = levelwise(in, minsup, [](const Ids&) { return true; }, result.stats);
  for (const auto& [ids, count] : found)
    result.table.entries.emplace(in.decode(ids), SupportEntry{count, true});
  return result;
}

SupportTable complete_subset_supports(std::span<const Transaction> dataset, SupportTable table,
                                      std::uint64_t* counted) {
  std::set<Itemset> missing;
  for (const auto& [items, entry] : table.entries) {
    if (!entry.frequent || items.size() < 2)
      continue;
    if (items.size() > 24)
      throw std::invalid_argument("frequent itemset too long to enumerate its subsets");
    Mask full = (Mask{1} << items.size()) - 1;
    for (Mask m = 1; m < full; ++m) {
      Itemset sub;
      for (std::size_t j = 0; j < items.size(); ++j)
        if (m >> j & 1)
          sub.push_back(items[j]);
      if (!table.entries.count(sub))
        missing.insert(std::move(sub));
    }
  }
  if (counted)
    *counted = missing.size();
  if (!missing.empty()) {
    std::vector<Itemset> subs(missing.begin(), missing.end());
    std::vector<std::uint64_t> counts(subs.size(), 0);
    for (const auto& t : dataset)
      for (std::size_t s = 0; s < subs.size(); ++s)
        counts[s] += std::includes(t.items.begin(), t.items.end(), subs[s].begin(), subs[s].end());
    for (std::size_t s = 0; s < subs.size(); ++s)
      table.entries.emplace(std::move(subs[s]), SupportEntry{counts[s], false});
  }
  table.rule_complete = true;
  return table;
}

} // namespace hmine
