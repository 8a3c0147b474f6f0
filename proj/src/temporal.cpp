#include "hmine/temporal.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include <fmt/format.h>

namespace hmine {

std::string_view to_string(TemporalPattern p) {
  switch (p) {
  case TemporalPattern::before:
    return "before";
  case TemporalPattern::after:
    return "after";
  case TemporalPattern::equal:
    return "equal";
  case TemporalPattern::overlaps:
    return "overlaps";
  case TemporalPattern::during:
    return "during";
  }
  return "?";
}

std::optional<TemporalPattern> parse_pattern(std::string_view text) {
  for (auto p : kAllPatterns)
    if (to_string(p) == text)
      return p;
  return std::nullopt;
}

bool eval_pattern(TemporalPattern p, const Event& a, const Event& b) {
  switch (p) {
  case TemporalPattern::before:
    return a.t_end < b.t_start;
  case TemporalPattern::after:
    return b.t_end < a.t_start;
  case TemporalPattern::equal:
    return a.t_start == b.t_start && a.t_end == b.t_end;
  case TemporalPattern::overlaps:
    return a.t_start < b.t_start && b.t_start <= a.t_end && a.t_end < b.t_end;
  case TemporalPattern::during:
    return b.t_start < a.t_start && a.t_end < b.t_end;
  }
  return false;
}

namespace {

std::optional<std::int64_t> parse_time(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

} // namespace

EventMap load_events(std::string_view text, const ClassificationTree& tree) {
  EventMap out;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#')
      continue;

    std::vector<std::string_view> fields;
    for (std::size_t f = 0;;) {
      auto tab = line.find('\t', f);
      fields.push_back(line.substr(f, tab == std::string_view::npos ? std::string_view::npos : tab - f));
      if (tab == std::string_view::npos)
        break;
      f = tab + 1;
    }
    if (fields.size() < 3 || fields.size() > 4)
      throw ParseError("malformed event line, expected <class>\\t<value>\\t<t_start>[\\t<t_end>]", lineno);
    Event e;
    try {
      e.class_code = tree.resolve(fields[0]);
    } catch (const DataError&) {
      throw ParseError(fmt::format("unknown class '{}'", fields[0]), lineno);
    }
    e.value = std::string(fields[1]);
    auto ts = parse_time(fields[2]);
    auto te = fields.size() == 4 ? parse_time(fields[3]) : ts;
    if (!ts || !te)
      throw ParseError("malformed timestamp", lineno);
    if (*ts > *te)
      throw ParseError(fmt::format("event ends before it starts ({} > {})", *ts, *te), lineno);
    e.t_start = *ts;
    e.t_end = *te;
    out[e.class_code].push_back(std::move(e));
  }
  return out;
}

TemporalResult mine_temporal(const EventMap& events, const ClassificationTree& tree, const ItemCode& class1,
                             const ItemCode& class2, std::span<const TemporalPattern> patterns,
                             std::uint64_t min_support, Rational min_confidence) {
  TemporalResult result;
  auto sub1 = tree.subtree_bfs(class1);
  auto sub2 = tree.subtree_bfs(class2);
  static const std::vector<Event> none;
  auto events_of = [&](const ItemCode& c) -> const std::vector<Event>& {
    auto it = events.find(c);
    return it == events.end() ? none : it->second;
  };

  auto has_events = [&](const std::vector<ItemCode>& sub) {
    return std::any_of(sub.begin(), sub.end(), [&](const ItemCode& c) { return !events_of(c).empty(); });
  };
  if (!has_events(sub1) || !has_events(sub2)) {
    result.warnings.push_back(fmt::format("no events under {}", has_events(sub1) ? class2.str() : class1.str()));
    return result;
  }

  using Key = std::tuple<std::string, std::string, TemporalPattern>;
  for (const auto& c1 : sub1) {
    const auto& e1 = events_of(c1);
    for (const auto& c2 : sub2) {
      const auto& e2 = events_of(c2);
      std::uint64_t join = static_cast<std::uint64_t>(e1.size()) * e2.size();
      if (join == 0 || join <= min_support)
        continue;
      std::map<Key, std::uint64_t> counts;
      std::map<std::string, std::uint64_t> first_value;
      for (const auto& a : e1)
        ++first_value[a.value];
      for (const auto& a : e1)
        for (const auto& b : e2)
          for (auto p : patterns)
            if (eval_pattern(p, a, b))
              ++counts[{a.value, b.value, p}];
      for (const auto& [key, count] : counts) {
        TemporalRule r;
        r.class1 = c1;
        r.class2 = c2;
        std::tie(r.value1, r.value2, r.pattern) = key;
        r.count = count;
        r.join_size = join;
        r.value1_pairs = first_value[r.value1] * e2.size();
        if (r.count < min_support || r.confidence() < min_confidence)
          continue;
        result.rules.push_back(std::move(r));
      }
    }
  }
  std::sort(result.rules.begin(), result.rules.end(), [](const TemporalRule& a, const TemporalRule& b) {
    return std::tie(a.class1, a.class2, a.value1, a.value2, a.pattern) <
           std::tie(b.class1, b.class2, b.value1, b.value2, b.pattern);
  });
  return result;
}

} // namespace hmine
