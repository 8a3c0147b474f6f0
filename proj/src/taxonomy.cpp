#include "hmine/taxonomy.hpp"

#include <algorithm>
#include <charconv>
#include <deque>

#include <fmt/format.h>

namespace hmine {

namespace {

std::optional<std::uint32_t> parse_index(std::string_view s) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

} // namespace

ItemCode ItemCode::parse(std::string_view text) {
  std::vector<std::uint32_t> path;
  for (auto seg : split(text, '.')) {
    auto idx = parse_index(seg);
    if (!idx)
      throw std::invalid_argument(fmt::format("malformed item path '{}'", text));
    path.push_back(*idx);
  }
  return ItemCode(std::move(path));
}

ItemCode ItemCode::parent() const {
  if (path_.empty())
    return {};
  return ItemCode(std::vector<std::uint32_t>(path_.begin(), path_.end() - 1));
}

ItemCode ItemCode::child(std::uint32_t index) const {
  auto p = path_;
  p.push_back(index);
  return ItemCode(std::move(p));
}

bool ItemCode::is_prefix_of(const ItemCode& other) const {
  return path_.size() <= other.path_.size() && std::equal(path_.begin(), path_.end(), other.path_.begin());
}

std::string ItemCode::str() const { return fmt::format("{}", fmt::join(path_, ".")); }

std::string to_string(const Itemset& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i)
      out += sep;
    out += items[i].str();
  }
  return out;
}

ClassificationTree::ClassificationTree(unsigned fanout_bound) : fanout_bound_(fanout_bound) {
  if (fanout_bound == 0)
    throw std::invalid_argument("fanout bound must be positive");
  nodes_.push_back(TaxonomyNode{});
  index_.emplace(ItemCode{}, 0);
}

void ClassificationTree::add_node(const ItemCode& code, std::string label) {
  if (code.empty())
    throw std::invalid_argument("empty item path");
  if (index_.count(code))
    throw std::invalid_argument(fmt::format("duplicate path {}", code.str()));
  auto parent_it = index_.find(code.parent());
  if (parent_it == index_.end())
    throw std::invalid_argument(fmt::format("missing parent for {}", code.str()));
  auto idx = code[code.depth() - 1];
  if (idx >= fanout_bound_)
    throw std::invalid_argument(
        fmt::format("index exceeds fanout: {} (fanout bound {})", code.str(), fanout_bound_));
  auto& parent = nodes_[parent_it->second];
  for (auto c : parent.children)
    if (nodes_[c].label == label)
      throw std::invalid_argument(fmt::format("duplicate sibling label '{}' at {}", label, code.str()));

  std::size_t id = nodes_.size();
  std::size_t parent_id = parent_it->second;
  nodes_.push_back(TaxonomyNode{code, std::move(label), parent_id, {}});
  auto& siblings = nodes_[parent_id].children;
  auto pos = std::lower_bound(siblings.begin(), siblings.end(), id,
                              [&](std::size_t a, std::size_t b) { return nodes_[a].code < nodes_[b].code; });
  siblings.insert(pos, id);
  index_.emplace(code, id);
  by_label_.emplace(nodes_[id].label, id);
  depth_ = std::max(depth_, code.depth());
}

std::size_t ClassificationTree::index_of(const ItemCode& code) const {
  auto it = index_.find(code);
  if (it == index_.end() || code.empty())
    throw DataError(fmt::format("unknown item {}", code.str()));
  return it->second;
}

const TaxonomyNode& ClassificationTree::node(const ItemCode& code) const { return nodes_[index_of(code)]; }

std::vector<ItemCode> ClassificationTree::children(const ItemCode& code) const {
  std::vector<ItemCode> out;
  for (auto c : nodes_[index_of(code)].children)
    out.push_back(nodes_[c].code);
  return out;
}

std::vector<ItemCode> ClassificationTree::top_level() const {
  std::vector<ItemCode> out;
  for (auto c : nodes_[0].children)
    out.push_back(nodes_[c].code);
  return out;
}

std::vector<ItemCode> ClassificationTree::codes() const {
  std::vector<ItemCode> out;
  for (const auto& [code, id] : index_)
    if (id != 0)
      out.push_back(code);
  return out;
}

std::vector<ItemCode> ClassificationTree::leaves() const {
  std::vector<ItemCode> out;
  for (const auto& [code, id] : index_)
    if (id != 0 && nodes_[id].children.empty())
      out.push_back(code);
  return out;
}

std::vector<ItemCode> ClassificationTree::subtree_bfs(const ItemCode& code) const {
  std::vector<ItemCode> out;
  std::deque<std::size_t> queue{index_of(code)};
  while (!queue.empty()) {
    auto id = queue.front();
    queue.pop_front();
    out.push_back(nodes_[id].code);
    queue.insert(queue.end(), nodes_[id].children.begin(), nodes_[id].children.end());
  }
  return out;
}

ItemCode ClassificationTree::resolve(std::string_view text) const {
  if (text.empty())
    throw DataError("empty item reference");
  if (text.find_first_not_of("0123456789.") == std::string_view::npos) {
    auto code = ItemCode::parse(text);
    if (!contains(code))
      throw DataError(fmt::format("unknown item {}", text));
    return code;
  }
  if (by_label_.count(text) == 1)
    return nodes_[by_label_.find(text)->second].code;

  std::size_t cur = 0;
  for (auto seg : split(text, '.')) {
    std::optional<std::size_t> next;
    for (auto c : nodes_[cur].children) {
      const auto& n = nodes_[c];
      auto idx = parse_index(seg);
      if ((idx && n.code[n.code.depth() - 1] == *idx) || (!idx && n.label == seg)) {
        next = c;
        break;
      }
    }
    if (!next)
      throw DataError(fmt::format("unknown item '{}'", text));
    cur = *next;
  }
  return nodes_[cur].code;
}

bool operator==(const ClassificationTree& a, const ClassificationTree& b) {
  if (a.fanout_bound_ != b.fanout_bound_ || a.size() != b.size())
    return false;
  for (const auto& [code, id] : a.index_) {
    auto it = b.index_.find(code);
    if (it == b.index_.end() || a.nodes_[id].label != b.nodes_[it->second].label)
      return false;
  }
  return true;
}

ClassificationTree parse_taxonomy(std::string_view text, unsigned fanout_bound) {
  ClassificationTree tree(fanout_bound);
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#')
      continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size())
      throw ParseError("malformed line, expected <path><TAB><label>", lineno);
    auto path_text = line.substr(0, tab);
    auto label = line.substr(tab + 1);
    if (label.find('\t') != std::string_view::npos)
      throw ParseError("malformed line, extra field", lineno);

    auto dot = path_text.rfind('.');
    auto last = parse_index(dot == std::string_view::npos ? path_text : path_text.substr(dot + 1));
    if (!last)
      throw ParseError(fmt::format("malformed path '{}'", path_text), lineno);
    ItemCode parent;
    if (dot != std::string_view::npos) {
      try {
        parent = tree.resolve(path_text.substr(0, dot));
      } catch (const DataError&) {
        throw ParseError(fmt::format("missing parent for '{}'", path_text), lineno);
      }
    }
    try {
      tree.add_node(parent.child(*last), std::string(label));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return tree;
}

std::string serialize_taxonomy(const ClassificationTree& tree) {
  std::string out;
  for (const auto& code : tree.codes())
    out += fmt::format("{}\t{}\n", code.str(), tree.label(code));
  return out;
}

std::vector<ItemCode> ancestors(const ClassificationTree& tree, const ItemCode& code) {
  tree.node(code);
  std::vector<ItemCode> out;
  for (auto p = code.parent(); !p.empty(); p = p.parent())
    out.push_back(p);
  return out;
}

bool is_descendant(const ClassificationTree& tree, const ItemCode& a, const ItemCode& b) {
  tree.node(a);
  tree.node(b);
  return b.depth() < a.depth() && b.is_prefix_of(a);
}

int dit(const ClassificationTree& tree, const ItemCode& code) {
  tree.node(code);
  return static_cast<int>(code.depth()) - 1;
}

int noc(const ClassificationTree& tree, const ItemCode& code) {
  return static_cast<int>(tree.node(code).children.size());
}

TreeMetricsReport metrics_report(const ClassificationTree& tree, int dit_warn_threshold) {
  TreeMetricsReport report;
  report.warn_threshold = dit_warn_threshold;
  std::int64_t dit_sum = 0;
  for (const auto& code : tree.codes()) {
    NodeMetrics m{code, tree.label(code), dit(tree, code), noc(tree, code), false};
    m.flagged = m.dit >= dit_warn_threshold;
    report.max_dit = std::max(report.max_dit, m.dit);
    report.max_noc = std::max(report.max_noc, m.noc);
    dit_sum += m.dit;
    report.nodes.push_back(std::move(m));
  }
  if (!report.nodes.empty())
    report.mean_dit = Rational(dit_sum, static_cast<std::int64_t>(report.nodes.size()));
  return report;
}

} // namespace hmine
