#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmine/common.hpp"
#include "hmine/taxonomy.hpp"

namespace hmine {

/// A value observed for some class over [t_start, t_end]; point events have t_start == t_end.
struct Event {
  ItemCode class_code;
  std::string value;
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
};

using EventMap = std::map<ItemCode, std::vector<Event>>;

enum class TemporalPattern { before, after, equal, overlaps, during };

inline constexpr TemporalPattern kAllPatterns[] = {TemporalPattern::before, TemporalPattern::after,
                                                   TemporalPattern::equal, TemporalPattern::overlaps,
                                                   TemporalPattern::during};

std::string_view to_string(TemporalPattern p);
std::optional<TemporalPattern> parse_pattern(std::string_view text);

bool eval_pattern(TemporalPattern p, const Event& a, const Event& b);

/// Event file: `<class path>\t<value>\t<t_start>[\t<t_end>]` per line, '#' comments.
EventMap load_events(std::string_view text, const ClassificationTree& tree);

struct TemporalRule {
  ItemCode class1;  // child classes the joined events came from
  ItemCode class2;
  std::string value1;
  std::string value2;
  TemporalPattern pattern = TemporalPattern::before;
  std::uint64_t count = 0;
  std::uint64_t join_size = 0;      // |events(class1)| * |events(class2)|
  std::uint64_t value1_pairs = 0;   // joined pairs whose first value is value1

  Rational support() const { return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(join_size)); }
  Rational confidence() const {
    return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(value1_pairs));
  }
};

struct TemporalResult {
  std::vector<TemporalRule> rules;
  std::vector<std::string> warnings;
};

/// Walks both class subtrees breadth first, joins the events of every class
/// pair and counts (value1, value2, pattern) occurrences. A class pair is
/// only examined when its join has more than `min_support` pairs; rules with
/// fewer than `min_support` occurrences or confidence below `min_confidence`
/// are dropped.
TemporalResult mine_temporal(const EventMap& events, const ClassificationTree& tree, const ItemCode& class1,
                             const ItemCode& class2, std::span<const TemporalPattern> patterns,
                             std::uint64_t min_support, Rational min_confidence);

} // namespace hmine
