#include "hmine/generate.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace hmine {

PlantedPair parse_plant(const std::string& text) {
  auto a = text.find(':');
  auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos)
    throw std::invalid_argument(fmt::format("plant '{}' is not <first>:<second>:<probability>", text));
  PlantedPair p{text.substr(0, a), text.substr(a + 1, b - a - 1), parse_rational(text.substr(b + 1))};
  if (p.probability < 0 || p.probability > 1)
    throw std::invalid_argument(fmt::format("plant probability must be in [0, 1]: '{}'", text));
  return p;
}

namespace {

std::string level_label(unsigned level, unsigned index) {
  if (level == 0)
    return index < 26 ? std::string(1, static_cast<char>('A' + index)) : fmt::format("C{}", index);
  if (level % 2 == 1)
    return std::to_string(index + 1);
  return index < 26 ? std::string(1, static_cast<char>('a' + index)) : fmt::format("_{}_", index);
}

} // namespace

ClassificationTree generate_taxonomy(const GeneratorConfig& config) {
  if (config.fanout == 0 || config.depth == 0)
    throw std::invalid_argument("fanout and depth must be positive");
  if (config.depth > 8)
    throw std::invalid_argument("depth above 8 is not supported by the generator");
  ClassificationTree tree(std::max(ClassificationTree::kDefaultFanoutBound, config.fanout));
  std::vector<std::pair<ItemCode, std::string>> level{{ItemCode{}, ""}};
  for (unsigned d = 0; d < config.depth; ++d) {
    std::vector<std::pair<ItemCode, std::string>> next;
    for (const auto& [code, label] : level)
      for (unsigned i = 0; i < config.fanout; ++i) {
        auto child = code.child(i);
        auto child_label = label + level_label(d, i);
        tree.add_node(child, child_label);
        next.emplace_back(std::move(child), std::move(child_label));
      }
    level = std::move(next);
  }
  return tree;
}

TransactionGenerator::TransactionGenerator(const ClassificationTree& tree, const GeneratorConfig& config)
    : config_(config), rng_(config.seed) {
  auto leaves = tree.leaves();
  std::size_t want = config.items == 0 ? leaves.size() : config.items;
  if (want > leaves.size())
    throw std::invalid_argument(
        fmt::format("{} items requested but the taxonomy has only {} leaves", want, leaves.size()));
  if (config.avg_items == 0)
    throw std::invalid_argument("average transaction size must be positive");
  // Fisher-Yates on raw draws: keeps the item choice platform independent.
  for (std::size_t i = leaves.size(); i > 1; --i)
    std::swap(leaves[i - 1], leaves[below(i)]);
  items_.assign(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(want));

  // Rank r gets weight ~ 1/(r+1)^skew, scaled to integers.
  std::uint64_t total = 0;
  for (std::size_t r = 0; r < items_.size(); ++r) {
    double w = 1.0;
    for (unsigned s = 0; s < config.skew; ++s)
      w /= static_cast<double>(r + 1);
    total += std::max<std::uint64_t>(1, static_cast<std::uint64_t>(w * 1e9));
    cumulative_.push_back(total);
  }

  for (const auto& p : config.plants) {
    Plant plant{tree.resolve(p.first), tree.resolve(p.second), p.probability, {}};
    if (plant.first.parent() != plant.second.parent() || plant.first == plant.second)
      throw std::invalid_argument(fmt::format("planted classes {} and {} must be distinct siblings", p.first, p.second));
    for (const auto& item : items_)
      if (plant.second.is_prefix_of(item))
        plant.second_items.push_back(item);
    if (plant.second_items.empty() && p.probability > 0)
      throw std::invalid_argument(fmt::format("no items in use under {}", p.second));
    plants_.push_back(std::move(plant));
  }
}

Transaction TransactionGenerator::next() {
  Transaction t;
  t.seq = seq_++;
  if (config_.timestamps)
    t.ts = static_cast<std::int64_t>(t.seq);
  auto size = 1 + below(2 * config_.avg_items - 1);
  for (std::uint64_t i = 0; i < size; ++i) {
    auto draw = below(cumulative_.back());
    auto pos = std::upper_bound(cumulative_.begin(), cumulative_.end(), draw) - cumulative_.begin();
    t.items.push_back(items_[static_cast<std::size_t>(pos)]);
  }
  for (const auto& p : plants_) {
    bool has_first = std::any_of(t.items.begin(), t.items.end(), [&](const ItemCode& i) { return p.first.is_prefix_of(i); });
    if (!has_first)
      continue;
    auto under_second = [&](const ItemCode& i) { return p.second.is_prefix_of(i); };
    auto roll = below(static_cast<std::uint64_t>(p.probability.denominator()));
    if (roll < static_cast<std::uint64_t>(p.probability.numerator())) {
      if (std::none_of(t.items.begin(), t.items.end(), under_second))
        t.items.push_back(p.second_items[below(p.second_items.size())]);
    } else {
      t.items.erase(std::remove_if(t.items.begin(), t.items.end(), under_second), t.items.end());
    }
  }
  std::sort(t.items.begin(), t.items.end());
  t.items.erase(std::unique(t.items.begin(), t.items.end()), t.items.end());
  return t;
}

void generate_stream(const ClassificationTree& tree, const GeneratorConfig& config, std::ostream& out) {
  TransactionGenerator gen(tree, config);
  for (std::size_t i = 0; i < config.transactions; ++i)
    out << format_transaction(gen.next()) << '\n';
}

} // namespace hmine
