#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmine/common.hpp"
#include "hmine/taxonomy.hpp"

namespace hmine {

struct Transaction {
  std::uint64_t seq = 0;
  Itemset items;  // distinct leaf codes
  std::optional<std::int64_t> ts;
};

/// A class of interest together with the bit assignment of its children.
struct InterestClass {
  ItemCode code;
  unsigned child_count = 0;
  std::vector<ItemCode> children;     // bit -> child code
  std::vector<int> bit_of_index;      // child index -> bit, -1 if no such child
  std::optional<std::size_t> sic_parent;  // nearest ancestor in the SIC
  std::vector<std::size_t> sic_children;  // SIC members whose nearest SIC ancestor is this one

  /// Bit of the child subtree containing `item`, or -1 when `item` is not strictly below this class.
  int bit_for(const ItemCode& item) const;
  Mask full_mask() const { return child_count == 64 ? ~Mask{0} : (Mask{1} << child_count) - 1; }
};

struct CountArray {
  std::vector<std::uint64_t> cells;  // indexed by exact projection mask
};

struct Projection {
  Mask mask = 0;
  Itemset reduced;
};

/// Splits `items` into the projection on `cls` and, when `rest` is given,
/// the remaining items. Adds one touch per item examined.
Projection project(const InterestClass& cls, std::span<const ItemCode> items, std::uint64_t& touches,
                   Itemset* rest = nullptr);

struct StreamConfig {
  unsigned bitmask_bound = 24;
};

constexpr unsigned kMaxBitmaskBound = 63;

struct TouchCounters {
  std::uint64_t horm = 0;
  std::uint64_t mhorm = 0;
  friend bool operator==(const TouchCounters&, const TouchCounters&) = default;
};

/// Per-class subset counts over a transaction stream. Single writer.
class StreamState {
public:
  StreamState(std::shared_ptr<const ClassificationTree> tree, std::span<const ItemCode> interest_codes,
              StreamConfig config = {});

  const ClassificationTree& tree() const { return *tree_; }
  const std::shared_ptr<const ClassificationTree>& tree_ptr() const { return tree_; }
  const StreamConfig& config() const { return config_; }

  /// Classes of interest, ancestors before descendants.
  const std::vector<InterestClass>& sic() const { return sic_; }
  const CountArray& counts(std::size_t k) const { return arrays_[k]; }
  /// Throws std::invalid_argument when `code` is not a class of interest.
  std::size_t class_index(const ItemCode& code) const;

  std::uint64_t n() const { return n_; }
  const TouchCounters& touches() const { return touches_; }
  /// Σ 2^m over the classes of interest.
  std::size_t counter_total() const;

  /// Baseline: every class matched against the full transaction.
  void process_horm(const Transaction& t);
  /// Same counts as process_horm, with hierarchy-aware counting and transaction reduction.
  void process_mhorm(const Transaction& t);

  /// Number of transactions whose projection on class k contains `mask`.
  std::uint64_t superset_count(std::size_t k, Mask mask) const;
  /// superset_count for every mask of class k at once.
  std::vector<std::uint64_t> superset_counts(std::size_t k) const;

  Rational support(const ItemCode& cls, Mask mask) const;
  std::vector<Mask> frequent_subsets(const ItemCode& cls, Rational minsup) const;

  std::string snapshot() const;
  static StreamState restore(std::string_view bytes, std::shared_ptr<const ClassificationTree> tree);

  friend bool operator==(const StreamState& a, const StreamState& b);

private:
  void mhorm_visit(std::span<const std::size_t> group, Itemset working);

  std::shared_ptr<const ClassificationTree> tree_;
  StreamConfig config_;
  std::vector<InterestClass> sic_;
  std::vector<std::size_t> sic_roots_;
  std::vector<CountArray> arrays_;
  std::uint64_t n_ = 0;
  TouchCounters touches_;
};

/// CRC32 of the serialized taxonomy; binds snapshots to their tree.
std::uint32_t tree_digest(const ClassificationTree& tree);

} // namespace hmine
