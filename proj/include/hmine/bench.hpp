#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmine/common.hpp"

namespace hmine {

struct StreamBenchConfig {
  std::uint64_t seed = 1;
  unsigned fanout = 4;
  unsigned depth = 4;
  std::size_t transactions = 5000;
  unsigned avg_items = 3;
  std::vector<std::string> sic;  // empty: nested-and-disjoint default
};

/// Classes used when no SIC is given: two ancestor chains plus a disjoint root.
std::vector<std::string> default_bench_sic();

struct StreamBenchReport {
  std::vector<std::string> sic;
  std::uint64_t transactions = 0;
  std::uint64_t touches_horm = 0;
  std::uint64_t touches_mhorm = 0;
  std::uint64_t fewer_touches = 0;  // transactions where mhorm touched strictly less
  bool counts_agree = false;
  double wall_ms_horm = 0;
  double wall_ms_mhorm = 0;

  Rational touch_ratio() const;
  Rational reduced_fraction() const;
};

StreamBenchReport run_stream_bench(const StreamBenchConfig& config);

struct ConstrainedBenchConfig {
  std::uint64_t seed = 1;
  unsigned fanout = 4;
  unsigned depth = 3;
  std::size_t transactions = 2000;
  unsigned avg_items = 6;
  unsigned skew = 1;
  Rational minsup{1, 100};
  std::vector<Rational> targets{Rational(1, 10), Rational(1, 100)};
};

struct ConstrainedBenchCase {
  Rational target{0};
  std::string constraint;
  Rational selectivity{0};  // share of all frequent itemsets that satisfy the constraint
  std::uint64_t discard_candidates = 0;
  std::uint64_t selected_candidates = 0;
  std::uint64_t direct_candidates = 0;
  bool tables_agree = false;
  double wall_ms_discard = 0;
  double wall_ms_selected = 0;
  double wall_ms_direct = 0;

  Rational candidate_ratio() const;  // discard / selected
};

struct ConstrainedBenchReport {
  std::uint64_t frequent_total = 0;
  std::vector<ConstrainedBenchCase> cases;
};

ConstrainedBenchReport run_constrained_bench(const ConstrainedBenchConfig& config);

} // namespace hmine
