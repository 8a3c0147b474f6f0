#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "hmine/common.hpp"
#include "hmine/taxonomy.hpp"
#include "hmine/transactions.hpp"

namespace hmine {

/// Sibling classes whose co-occurrence is forced: when a transaction holds
/// something under `first`, it holds something under `second` with the given
/// probability and nothing under it otherwise.
struct PlantedPair {
  std::string first;
  std::string second;
  Rational probability{0};
};

/// Parses "A1:A2:0.9".
PlantedPair parse_plant(const std::string& text);

struct GeneratorConfig {
  std::uint64_t seed = 1;
  unsigned fanout = 4;
  unsigned depth = 3;
  std::size_t items = 0;  // leaves in use; 0 means all
  std::size_t transactions = 1000;
  unsigned avg_items = 4;
  unsigned skew = 1;      // Zipf exponent over item ranks; 0 is uniform
  bool timestamps = false;
  std::vector<PlantedPair> plants;
};

/// Full `fanout`-ary tree of the given depth with readable labels (A, A1, A1a, ...).
ClassificationTree generate_taxonomy(const GeneratorConfig& config);

/// Seeded transaction source. Draws only from std::mt19937_64's raw output,
/// so the sequence is identical on every platform.
class TransactionGenerator {
public:
  TransactionGenerator(const ClassificationTree& tree, const GeneratorConfig& config);

  Transaction next();
  const Itemset& items() const { return items_; }

private:
  struct Plant {
    ItemCode first;
    ItemCode second;
    Rational probability;
    Itemset second_items;
  };

  std::uint64_t below(std::uint64_t bound) { return rng_() % bound; }

  GeneratorConfig config_;
  std::mt19937_64 rng_;
  Itemset items_;
  std::vector<std::uint64_t> cumulative_;  // Zipf weights, cumulative
  std::vector<Plant> plants_;
  std::uint64_t seq_ = 0;
};

/// Writes `config.transactions` lines to `out`.
void generate_stream(const ClassificationTree& tree, const GeneratorConfig& config, std::ostream& out);

} // namespace hmine
