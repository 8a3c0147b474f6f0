#pragma once

#include <memory>
#include <random>
#include <string>

#include "hmine/taxonomy.hpp"
#include "hmine/transactions.hpp"

namespace fixtures {

// Clothes -> Outerwear -> {Jackets, SkiPants}; Footwear -> {Shoes, HikingBoots}
inline const char* kClothing =
    "# clothing taxonomy\n"
    "0\tClothes\n"
    "0.0\tOuterwear\n"
    "0.0.0\tJackets\n"
    "0.0.1\tSkiPants\n"
    "1\tFootwear\n"
    "1.0\tShoes\n"
    "1.1\tHikingBoots\n";

// Class A with four leaf children.
inline const char* kClassA = "0\tA\n0.0\tA1\n0.1\tA2\n0.2\tA3\n0.3\tA4\n";

// Four-level coding: class, sub-class (A1..A4 at indices 1..4), P/Q, item 6/7.
inline std::string coded_tree_text() {
  std::string out;
  const char* top[] = {"A", "B"};
  for (int c = 0; c < 2; ++c) {
    out += std::to_string(c) + "\t" + top[c] + "\n";
    for (int s = 1; s <= 4; ++s) {
      auto sp = std::to_string(c) + "." + std::to_string(s);
      out += sp + "\t" + top[c] + std::to_string(s) + "\n";
      const char* pq[] = {"P", "Q"};
      for (int k = 0; k < 2; ++k) {
        auto kp = sp + "." + std::to_string(k);
        out += kp + "\t" + pq[k] + "\n";
        for (int item : {6, 7})
          out += kp + "." + std::to_string(item) + "\t" + std::to_string(item) + "\n";
      }
    }
  }
  return out;
}

// Items 1..5 as top-level leaves (index 0 unused so paths read as item numbers).
inline const char* kFlatFive = "1\tone\n2\ttwo\n3\tthree\n4\tfour\n5\tfive\n";

inline std::shared_ptr<const hmine::ClassificationTree> tree(const std::string& text) {
  return std::make_shared<const hmine::ClassificationTree>(hmine::parse_taxonomy(text));
}

/// Full M-ary tree of the given depth, numeric labels prefixed by level.
inline std::string balanced_tree_text(unsigned m, unsigned depth) {
  std::string out;
  std::vector<std::string> level{""};
  for (unsigned d = 1; d <= depth; ++d) {
    std::vector<std::string> next;
    for (const auto& p : level)
      for (unsigned i = 0; i < m; ++i) {
        auto path = p.empty() ? std::to_string(i) : p + "." + std::to_string(i);
        out += path + "\tn" + path + "\n";
        next.push_back(path);
      }
    level = std::move(next);
  }
  return out;
}

inline std::vector<hmine::Transaction> random_stream(const hmine::ClassificationTree& t, std::size_t count,
                                                     std::size_t max_items, std::mt19937_64& rng) {
  auto leaves = t.leaves();
  std::vector<hmine::Transaction> out;
  for (std::size_t s = 0; s < count; ++s) {
    hmine::Transaction tx;
    tx.seq = s;
    auto k = rng() % (max_items + 1);
    for (std::size_t i = 0; i < k; ++i)
      tx.items.push_back(leaves[rng() % leaves.size()]);
    std::sort(tx.items.begin(), tx.items.end());
    tx.items.erase(std::unique(tx.items.begin(), tx.items.end()), tx.items.end());
    out.push_back(std::move(tx));
  }
  return out;
}

} // namespace fixtures
