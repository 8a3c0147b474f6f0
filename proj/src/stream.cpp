#include "hmine/stream.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include <boost/crc.hpp>
#include <fmt/format.h>

namespace hmine {

int InterestClass::bit_for(const ItemCode& item) const {
  auto d = code.depth();
  if (item.depth() <= d || !code.is_prefix_of(item))
    return -1;
  auto idx = item[d];
  return idx < bit_of_index.size() ? bit_of_index[idx] : -1;
}

Projection project(const InterestClass& cls, std::span<const ItemCode> items, std::uint64_t& touches,
                   Itemset* rest) {
  Projection p;
  for (const auto& item : items) {
    ++touches;
    int bit = cls.bit_for(item);
    if (bit >= 0) {
      p.mask |= Mask{1} << bit;
      p.reduced.push_back(item);
    } else if (rest) {
      rest->push_back(item);
    }
  }
  return p;
}

StreamState::StreamState(std::shared_ptr<const ClassificationTree> tree, std::span<const ItemCode> interest_codes,
                         StreamConfig config)
    : tree_(std::move(tree)), config_(config) {
  if (!tree_)
    throw std::invalid_argument("null taxonomy");
  if (config_.bitmask_bound == 0 || config_.bitmask_bound > kMaxBitmaskBound)
    throw std::invalid_argument(fmt::format("bitmask bound must be in [1, {}]", kMaxBitmaskBound));

  std::vector<ItemCode> codes(interest_codes.begin(), interest_codes.end());
  std::sort(codes.begin(), codes.end());  // path order puts ancestors first
  if (std::adjacent_find(codes.begin(), codes.end()) != codes.end())
    throw std::invalid_argument("duplicate class in SIC");

  for (const auto& code : codes) {
    const auto& node = tree_->node(code);
    if (node.children.empty())
      throw std::invalid_argument(fmt::format("leaf {} cannot be a class of interest", code.str()));
    InterestClass cls;
    cls.code = code;
    cls.children = tree_->children(code);
    cls.child_count = static_cast<unsigned>(cls.children.size());
    if (cls.child_count > config_.bitmask_bound)
      throw std::invalid_argument(fmt::format("fanout exceeds bitmask bound: {} has {} children (bound {})",
                                              code.str(), cls.child_count, config_.bitmask_bound));
    auto max_index = cls.children.back()[code.depth()];
    cls.bit_of_index.assign(max_index + 1, -1);
    for (unsigned b = 0; b < cls.child_count; ++b)
      cls.bit_of_index[cls.children[b][code.depth()]] = static_cast<int>(b);

    for (std::size_t j = sic_.size(); j-- > 0;) {
      if (sic_[j].code.is_prefix_of(code)) {
        cls.sic_parent = j;
        break;
      }
    }
    std::size_t k = sic_.size();
    if (cls.sic_parent)
      sic_[*cls.sic_parent].sic_children.push_back(k);
    else
      sic_roots_.push_back(k);
    sic_.push_back(std::move(cls));
    arrays_.push_back(CountArray{std::vector<std::uint64_t>(std::size_t{1} << sic_.back().child_count, 0)});
  }
}

std::size_t StreamState::class_index(const ItemCode& code) const {
  for (std::size_t k = 0; k < sic_.size(); ++k)
    if (sic_[k].code == code)
      return k;
  throw std::invalid_argument(fmt::format("{} is not a class of interest", code.str()));
}

std::size_t StreamState::counter_total() const {
  std::size_t total = 0;
  for (const auto& a : arrays_)
    total += a.cells.size();
  return total;
}

void StreamState::process_horm(const Transaction& t) {
  ++n_;
  for (std::size_t k = 0; k < sic_.size(); ++k) {
    auto p = project(sic_[k], t.items, touches_.horm);
    if (p.mask)
      ++arrays_[k].cells[p.mask];
  }
}

void StreamState::process_mhorm(const Transaction& t) {
  ++n_;
  mhorm_visit(sic_roots_, t.items);
}

void StreamState::mhorm_visit(std::span<const std::size_t> group, Itemset working) {
  // Members of `group` share no items, so each one only sees what its
  // predecessors left behind; a class's SIC descendants only see its projection.
  for (auto k : group) {
    if (working.empty())
      return;
    Itemset rest;
    auto p = project(sic_[k], working, touches_.mhorm, &rest);
    if (p.mask) {
      ++arrays_[k].cells[p.mask];
      if (!sic_[k].sic_children.empty())
        mhorm_visit(sic_[k].sic_children, std::move(p.reduced));
    }
    working = std::move(rest);
  }
}

std::uint64_t StreamState::superset_count(std::size_t k, Mask mask) const {
  const auto& cells = arrays_.at(k).cells;
  Mask full = sic_[k].full_mask();
  if (mask & ~full)
    throw std::invalid_argument("mask has bits outside the class");
  std::uint64_t total = 0;
  // Supersets of `mask` are `mask` plus any subset of the free bits.
  Mask free = full & ~mask;
  for (Mask sub = free;; sub = (sub - 1) & free) {
    total += cells[mask | sub];
    if (sub == 0)
      break;
  }
  return total;
}

std::vector<std::uint64_t> StreamState::superset_counts(std::size_t k) const {
  auto sums = arrays_.at(k).cells;
  auto m = sic_[k].child_count;
  for (unsigned b = 0; b < m; ++b)
    for (Mask s = 0; s < sums.size(); ++s)
      if (!(s & (Mask{1} << b)))
        sums[s] += sums[s | (Mask{1} << b)];
  return sums;
}

Rational StreamState::support(const ItemCode& cls, Mask mask) const {
  auto k = class_index(cls);
  if (mask == 0)
    throw std::invalid_argument("support of the empty mask is undefined");
  if (n_ == 0)
    throw std::domain_error("no transactions processed");
  return Rational(static_cast<std::int64_t>(superset_count(k, mask)), static_cast<std::int64_t>(n_));
}

std::vector<Mask> StreamState::frequent_subsets(const ItemCode& cls, Rational minsup) const {
  if (!is_probability(minsup))
    throw std::invalid_argument("minsup must be in (0, 1]");
  auto k = class_index(cls);
  std::vector<Mask> out;
  if (n_ == 0)
    return out;
  auto sums = superset_counts(k);
  for (Mask s = 1; s < sums.size(); ++s)
    if (meets(sums[s], n_, minsup))
      out.push_back(s);
  return out;
}

bool operator==(const StreamState& a, const StreamState& b) {
  if (a.n_ != b.n_ || !(a.touches_ == b.touches_) || a.sic_.size() != b.sic_.size())
    return false;
  for (std::size_t k = 0; k < a.sic_.size(); ++k)
    if (a.sic_[k].code != b.sic_[k].code || a.arrays_[k].cells != b.arrays_[k].cells)
      return false;
  return true;
}

std::uint32_t tree_digest(const ClassificationTree& tree) {
  boost::crc_32_type crc;
  auto text = serialize_taxonomy(tree);
  crc.process_bytes(text.data(), text.size());
  auto bound = tree.fanout_bound();
  unsigned char b[4] = {static_cast<unsigned char>(bound), static_cast<unsigned char>(bound >> 8),
                        static_cast<unsigned char>(bound >> 16), static_cast<unsigned char>(bound >> 24)};
  crc.process_bytes(b, 4);
  return crc.checksum();
}

namespace {

constexpr char kMagic[4] = {'H', 'O', 'R', 'M'};
constexpr std::uint16_t kSnapshotVersion = 1;

class Writer {
public:
  template <typename T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
      out_.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string& bytes() { return out_; }

private:
  std::string out_;
};

class Reader {
public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n)
      throw DataError("snapshot truncated");
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

} // namespace

std::string StreamState::snapshot() const {
  Writer w;
  w.raw(kMagic, 4);
  w.put<std::uint16_t>(kSnapshotVersion);
  w.put<std::uint32_t>(tree_digest(*tree_));
  w.put<std::uint32_t>(config_.bitmask_bound);
  w.put<std::uint64_t>(n_);
  w.put<std::uint64_t>(touches_.horm);
  w.put<std::uint64_t>(touches_.mhorm);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sic_.size()));
  for (std::size_t k = 0; k < sic_.size(); ++k) {
    const auto& cls = sic_[k];
    w.put<std::uint16_t>(static_cast<std::uint16_t>(cls.code.depth()));
    for (auto idx : cls.code.path())
      w.put<std::uint32_t>(idx);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(cls.child_count));
    for (auto c : arrays_[k].cells)
      w.put<std::uint64_t>(c);
  }
  boost::crc_32_type crc;
  crc.process_bytes(w.bytes().data(), w.bytes().size());
  w.put<std::uint32_t>(crc.checksum());
  return std::move(w.bytes());
}

StreamState StreamState::restore(std::string_view bytes, std::shared_ptr<const ClassificationTree> tree) {
  Reader r(bytes);
  r.need(4);
  if (bytes.substr(0, 4) != std::string_view(kMagic, 4))
    throw DataError("not a snapshot (bad magic)");
  for (int i = 0; i < 4; ++i)
    r.get<std::uint8_t>();
  auto version = r.get<std::uint16_t>();
  if (version != kSnapshotVersion)
    throw DataError(fmt::format("snapshot version mismatch: got {}, expected {}", version, kSnapshotVersion));
  auto digest = r.get<std::uint32_t>();
  StreamConfig config{r.get<std::uint32_t>()};
  auto n = r.get<std::uint64_t>();
  TouchCounters touches{r.get<std::uint64_t>(), r.get<std::uint64_t>()};
  auto k_count = r.get<std::uint32_t>();

  std::vector<ItemCode> codes;
  std::vector<std::vector<std::uint64_t>> cells;
  for (std::uint32_t k = 0; k < k_count; ++k) {
    auto depth = r.get<std::uint16_t>();
    std::vector<std::uint32_t> path;
    for (std::uint16_t i = 0; i < depth; ++i)
      path.push_back(r.get<std::uint32_t>());
    unsigned m = r.get<std::uint8_t>();
    if (m > kMaxBitmaskBound || r.remaining() / 8 < (std::size_t{1} << m))
      throw DataError("snapshot truncated");
    std::vector<std::uint64_t> c(std::size_t{1} << m);
    for (auto& v : c)
      v = r.get<std::uint64_t>();
    codes.emplace_back(std::move(path));
    cells.push_back(std::move(c));
  }
  auto body_end = r.pos();
  auto stored_crc = r.get<std::uint32_t>();
  if (r.remaining() != 0)
    throw DataError("snapshot has trailing bytes");
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), body_end);
  if (crc.checksum() != stored_crc)
    throw DataError("snapshot checksum failure");
  if (digest != tree_digest(*tree))
    throw DataError("snapshot was written against a different taxonomy");

  StreamState state(std::move(tree), codes, config);
  for (std::size_t k = 0; k < codes.size(); ++k) {
    // codes were written in SIC order, which the constructor reproduces
    if (state.sic_[k].code != codes[k] || state.arrays_[k].cells.size() != cells[k].size())
      throw DataError("snapshot class layout does not match taxonomy");
    state.arrays_[k].cells = std::move(cells[k]);
  }
  state.n_ = n;
  state.touches_ = touches;
  return state;
}

} // namespace hmine
