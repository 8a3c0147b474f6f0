#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmine/common.hpp"

namespace hmine {

/// Position of a node in the classification tree: one child index per level.
class ItemCode {
public:
  ItemCode() = default;
  explicit ItemCode(std::vector<std::uint32_t> path) : path_(std::move(path)) {}
  ItemCode(std::initializer_list<std::uint32_t> path) : path_(path) {}

  /// Strictly numeric dotted form, e.g. "2.0.3.1".
  static ItemCode parse(std::string_view text);

  std::span<const std::uint32_t> path() const { return path_; }
  std::size_t depth() const { return path_.size(); }
  bool empty() const { return path_.empty(); }
  std::uint32_t operator[](std::size_t level) const { return path_[level]; }

  ItemCode parent() const;
  ItemCode child(std::uint32_t index) const;

  /// True when this code is a (non-strict) prefix of `other`.
  bool is_prefix_of(const ItemCode& other) const;

  std::string str() const;

  friend bool operator==(const ItemCode&, const ItemCode&) = default;
  friend auto operator<=>(const ItemCode&, const ItemCode&) = default;

private:
  std::vector<std::uint32_t> path_;
};

/// Codes sorted in path order; the canonical itemset form.
using Itemset = std::vector<ItemCode>;

std::string to_string(const Itemset& items, char sep = ',');

struct TaxonomyNode {
  ItemCode code;
  std::string label;
  std::size_t parent = 0;
  std::vector<std::size_t> children;  // ascending child index
};

/// Item hierarchy under a virtual root. Node 0 is the virtual root.
class ClassificationTree {
public:
  static constexpr unsigned kDefaultFanoutBound = 16;

  explicit ClassificationTree(unsigned fanout_bound = kDefaultFanoutBound);

  /// Adds a node whose parent already exists. Throws std::invalid_argument.
  void add_node(const ItemCode& code, std::string label);

  unsigned fanout_bound() const { return fanout_bound_; }
  std::size_t depth() const { return depth_; }
  /// Number of real nodes (virtual root excluded).
  std::size_t size() const { return nodes_.size() - 1; }
  bool empty() const { return size() == 0; }

  bool contains(const ItemCode& code) const { return index_.count(code) != 0; }
  /// Throws DataError for unknown codes.
  const TaxonomyNode& node(const ItemCode& code) const;
  const std::string& label(const ItemCode& code) const { return node(code).label; }
  bool is_leaf(const ItemCode& code) const { return node(code).children.empty(); }

  std::vector<ItemCode> children(const ItemCode& code) const;
  std::vector<ItemCode> top_level() const;
  /// Every node in path order (parents before children).
  std::vector<ItemCode> codes() const;
  std::vector<ItemCode> leaves() const;
  /// `code` followed by its descendants, level by level.
  std::vector<ItemCode> subtree_bfs(const ItemCode& code) const;

  /// Accepts a numeric path, a unique label, or a dotted path whose
  /// segments are child indices or sibling labels ("A.1.Q.6").
  ItemCode resolve(std::string_view text) const;

  friend bool operator==(const ClassificationTree& a, const ClassificationTree& b);

private:
  std::size_t index_of(const ItemCode& code) const;

  unsigned fanout_bound_;
  std::size_t depth_ = 0;
  std::vector<TaxonomyNode> nodes_;
  std::map<ItemCode, std::size_t> index_;
  std::multimap<std::string, std::size_t, std::less<>> by_label_;
};

/// Taxonomy file: `<path>\t<label>` per line, parents first, '#' comments.
ClassificationTree parse_taxonomy(std::string_view text,
                                  unsigned fanout_bound = ClassificationTree::kDefaultFanoutBound);
std::string serialize_taxonomy(const ClassificationTree& tree);

/// Strict ancestors, immediate parent first.
std::vector<ItemCode> ancestors(const ClassificationTree& tree, const ItemCode& code);
/// True iff `b` is a strict ancestor of `a`.
bool is_descendant(const ClassificationTree& tree, const ItemCode& a, const ItemCode& b);
int dit(const ClassificationTree& tree, const ItemCode& code);
int noc(const ClassificationTree& tree, const ItemCode& code);

struct NodeMetrics {
  ItemCode code;
  std::string label;
  int dit = 0;
  int noc = 0;
  bool flagged = false;
};

struct TreeMetricsReport {
  std::vector<NodeMetrics> nodes;
  int max_dit = 0;
  int max_noc = 0;
  Rational mean_dit{0};
  int warn_threshold = 0;
};

constexpr int kDefaultDitWarnThreshold = 5;

TreeMetricsReport metrics_report(const ClassificationTree& tree,
                                 int dit_warn_threshold = kDefaultDitWarnThreshold);

} // namespace hmine
