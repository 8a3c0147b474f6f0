#include "hmine/bench.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <memory>

#include <fmt/format.h>

#include "hmine/constraints.hpp"
#include "hmine/generate.hpp"
#include "hmine/stream.hpp"

namespace hmine {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

Rational ratio(std::uint64_t a, std::uint64_t b) {
  if (b == 0)
    return Rational(0);
  return Rational(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
}

} // namespace

std::vector<std::string> default_bench_sic() { return {"A", "A1", "A1a", "B", "B2", "C"}; }

Rational StreamBenchReport::touch_ratio() const { return ratio(touches_mhorm, touches_horm); }
Rational StreamBenchReport::reduced_fraction() const { return ratio(fewer_touches, transactions); }

StreamBenchReport run_stream_bench(const StreamBenchConfig& config) {
  GeneratorConfig gen_config;
  gen_config.seed = config.seed;
  gen_config.fanout = config.fanout;
  gen_config.depth = config.depth;
  gen_config.transactions = config.transactions;
  gen_config.avg_items = config.avg_items;
  auto tree = std::make_shared<const ClassificationTree>(generate_taxonomy(gen_config));

  StreamBenchReport report;
  report.sic = config.sic.empty() ? default_bench_sic() : config.sic;
  std::vector<ItemCode> codes;
  for (const auto& s : report.sic)
    codes.push_back(tree->resolve(s));

  std::vector<Transaction> data;
  TransactionGenerator gen(*tree, gen_config);
  for (std::size_t i = 0; i < config.transactions; ++i)
    data.push_back(gen.next());
  report.transactions = data.size();

  StreamState horm(tree, codes), mhorm(tree, codes);
  std::vector<std::uint64_t> per_horm;
  per_horm.reserve(data.size());
  auto start = Clock::now();
  for (const auto& t : data) {
    auto before = horm.touches().horm;
    horm.process_horm(t);
    per_horm.push_back(horm.touches().horm - before);
  }
  report.wall_ms_horm = elapsed_ms(start);

  start = Clock::now();
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto before = mhorm.touches().mhorm;
    mhorm.process_mhorm(data[i]);
    if (mhorm.touches().mhorm - before < per_horm[i])
      ++report.fewer_touches;
  }
  report.wall_ms_mhorm = elapsed_ms(start);

  report.touches_horm = horm.touches().horm;
  report.touches_mhorm = mhorm.touches().mhorm;
  report.counts_agree = true;
  for (std::size_t k = 0; k < codes.size(); ++k)
    report.counts_agree = report.counts_agree && horm.counts(k).cells == mhorm.counts(k).cells;
  return report;
}

Rational ConstrainedBenchCase::candidate_ratio() const { return ratio(discard_candidates, selected_candidates); }

ConstrainedBenchReport run_constrained_bench(const ConstrainedBenchConfig& config) {
  GeneratorConfig gen_config;
  gen_config.seed = config.seed;
  gen_config.fanout = config.fanout;
  gen_config.depth = config.depth;
  gen_config.transactions = config.transactions;
  gen_config.avg_items = config.avg_items;
  gen_config.skew = config.skew;
  auto tree = generate_taxonomy(gen_config);
  std::vector<Transaction> data;
  TransactionGenerator gen(tree, gen_config);
  for (std::size_t i = 0; i < config.transactions; ++i)
    data.push_back(gen.next());

  ConstrainedBenchReport report;
  auto all = mine_frequent(data, config.minsup);
  report.frequent_total = all.table.entries.size();
  if (report.frequent_total == 0)
    return report;

  // A single-item constraint is satisfied by exactly the frequent itemsets containing it.
  std::map<ItemCode, std::uint64_t> containing;
  for (const auto& [items, entry] : all.table.entries)
    for (const auto& i : items)
      ++containing[i];

  for (const auto& target : config.targets) {
    const ItemCode* best = nullptr;
    double best_gap = 0;
    double want = boost::rational_cast<double>(target);
    for (const auto& [item, count] : containing) {
      double share = static_cast<double>(count) / static_cast<double>(report.frequent_total);
      double gap = std::abs(std::log(share / want));
      if (best == nullptr || gap < best_gap) {
        best = &item;
        best_gap = gap;
      }
    }
    ConstrainedBenchCase c;
    c.target = target;
    c.constraint = best->str();
    c.selectivity = ratio(containing[*best], report.frequent_total);
    auto b = parse_constraint(c.constraint, tree);

    auto start = Clock::now();
    auto discard = mine_constrained(data, tree, b, config.minsup, Strategy::discard);
    c.wall_ms_discard = elapsed_ms(start);
    start = Clock::now();
    auto selected = mine_constrained(data, tree, b, config.minsup, Strategy::selected);
    c.wall_ms_selected = elapsed_ms(start);
    start = Clock::now();
    auto direct = mine_constrained(data, tree, b, config.minsup, Strategy::direct);
    c.wall_ms_direct = elapsed_ms(start);

    c.discard_candidates = discard.stats.candidates;
    c.selected_candidates = selected.stats.candidates;
    c.direct_candidates = direct.stats.candidates;
    c.tables_agree = discard.table == selected.table && selected.table == direct.table;
    report.cases.push_back(std::move(c));
  }
  return report;
}

} // namespace hmine
