#include "hmine/cli.hpp"

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hmine/bench.hpp"
#include "hmine/constraints.hpp"
#include "hmine/generate.hpp"
#include "hmine/rulegen.hpp"
#include "hmine/stream.hpp"
#include "hmine/taxonomy.hpp"
#include "hmine/temporal.hpp"
#include "hmine/transactions.hpp"

namespace hmine {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string taxonomy;
  std::string input = "-";
  std::string output = "-";
  std::string taxonomy_out;
  std::vector<std::string> sic;
  std::string minsup = "0.1";
  std::string minconf = "0.5";
  std::string constraint;
  std::string strategy = "selected";
  std::string algo = "mhorm";
  std::string snapshot_out;
  std::string resume;
  std::string class1;
  std::string class2;
  std::string patterns = "all";
  std::string mode = "all";
  std::vector<std::string> plants;
  std::uint64_t seed = 1;
  std::uint64_t min_count = 1;
  unsigned fanout_bound = ClassificationTree::kDefaultFanoutBound;
  unsigned bitmask_bound = StreamConfig{}.bitmask_bound;
  unsigned fanout = 4;
  unsigned depth = 3;
  std::size_t items = 0;
  std::size_t transactions = 1000;
  unsigned avg_items = 4;
  unsigned skew = 1;
  int warn_dit = kDefaultDitWarnThreshold;
  bool stats = false;
  bool lenient = false;
  bool prune = false;
  bool timestamps = false;
};

// Anything that goes wrong while interpreting flags and config files is a usage error.
template <class F>
auto configure(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw UsageError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return read_file(path);
}

std::shared_ptr<const ClassificationTree> load_tree(const Options& o) {
  if (o.taxonomy.empty())
    throw UsageError("--taxonomy is required");
  auto text = read_file(o.taxonomy);
  return configure([&] { return std::make_shared<const ClassificationTree>(parse_taxonomy(text, o.fanout_bound)); });
}

Rational threshold(const std::string& text, const char* name) {
  auto r = configure([&] { return parse_rational(text); });
  if (!is_probability(r))
    throw UsageError(fmt::format("{} must be in (0, 1], got '{}'", name, text));
  return r;
}

std::vector<ItemCode> resolve_sic(const std::vector<std::string>& names, const ClassificationTree& tree) {
  std::vector<ItemCode> codes;
  for (const auto& arg : names) {
    std::stringstream ss(arg);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty())
        codes.push_back(configure([&] { return tree.resolve(part); }));
  }
  return codes;
}

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw UsageError(fmt::format("cannot write '{}'", path));
  f << data;
  if (!f)
    throw DataError(fmt::format("write to '{}' failed", path));
}

constexpr const char* kFrequentHeader = "# F\tclass\titemset\tcount\tn\tsupport\n";
constexpr const char* kRuleHeader =
    "# R\tclass\tantecedent\tconsequent\tsupport_count\tantecedent_count\tn\tsupport\tconfidence\n";

void print_frequent(std::ostream& out, const std::string& cls, const Itemset& items, std::uint64_t count,
                    std::uint64_t n) {
  out << fmt::format("F\t{}\t{}\t{}\t{}\t{}\n", cls, to_string(items), count, n,
                     format_decimal(Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(n))));
}

void print_rules(std::ostream& out, const std::vector<AssociationRule>& rules) {
  for (const auto& r : rules)
    out << fmt::format("R\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.parent_class ? r.parent_class->str() : "-",
                       to_string(r.antecedent), to_string(r.consequent), r.support_count, r.antecedent_count, r.n,
                       format_decimal(r.support()), format_decimal(r.confidence()));
}

void print_state_tables(std::ostream& out, const StreamState& state, Rational minsup, Rational minconf, bool prune) {
  out << kFrequentHeader;
  std::vector<AssociationRule> rules;
  if (state.n() > 0) {
    for (std::size_t k = 0; k < state.sic().size(); ++k) {
      const auto& cls = state.sic()[k];
      for (auto mask : state.frequent_subsets(cls.code, minsup)) {
        Itemset items;
        for (unsigned b = 0; b < cls.child_count; ++b)
          if (mask >> b & 1)
            items.push_back(cls.children[b]);
        print_frequent(out, cls.code.str(), items, state.superset_count(k, mask), state.n());
      }
      auto class_rules = rules_from_class(state, cls.code, minsup, minconf);
      if (prune)
        class_rules = prune_redundant(class_rules);
      rules.insert(rules.end(), class_rules.begin(), class_rules.end());
    }
  }
  out << kRuleHeader;
  print_rules(out, rules);
}

void drain_warnings(std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings)
    err << "warning: " << w << '\n';
  warnings.clear();
}

int cmd_mine_stream(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  auto tree = load_tree(o);
  auto minsup = threshold(o.minsup, "minsup");
  auto minconf = threshold(o.minconf, "minconf");
  auto codes = resolve_sic(o.sic, *tree);

  std::optional<StreamState> state;
  if (!o.resume.empty()) {
    state.emplace(StreamState::restore(read_file(o.resume), tree));
    if (!codes.empty()) {
      std::vector<ItemCode> have;
      for (const auto& c : state->sic())
        have.push_back(c.code);
      std::sort(codes.begin(), codes.end());
      if (codes != have)
        throw UsageError("--sic does not match the classes stored in the snapshot");
    }
  } else {
    if (codes.empty())
      throw UsageError("--sic is required unless resuming from a snapshot");
    state.emplace(configure([&] { return StreamState(tree, codes, StreamConfig{o.bitmask_bound}); }));
  }

  std::ifstream file;
  if (o.input != "-") {
    file.open(o.input);
    if (!file)
      throw UsageError(fmt::format("cannot open '{}'", o.input));
  }
  std::istream& source = o.input == "-" ? in : file;

  auto start = Clock::now();
  TransactionReader reader(source, *tree, o.lenient, state->n());
  bool horm = o.algo == "horm";
  while (auto t = reader.next()) {
    if (horm)
      state->process_horm(*t);
    else
      state->process_mhorm(*t);
    drain_warnings(reader.warnings(), err);
  }
  drain_warnings(reader.warnings(), err);

  if (!o.snapshot_out.empty())
    write_output(o.snapshot_out, state->snapshot(), out);

  print_state_tables(out, *state, minsup, minconf, o.prune);
  if (o.stats)
    out << fmt::format("#stats\talgo={}\tn={}\ttouches_horm={}\ttouches_mhorm={}\tcounters={}\tstate_bytes={}"
                       "\tpeak_rss_kb={}\twall_ms={}\n",
                       o.algo, state->n(), state->touches().horm, state->touches().mhorm, state->counter_total(),
                       state->counter_total() * sizeof(std::uint64_t), peak_rss_kb(), elapsed_ms(start));
  return kExitOk;
}

int cmd_rules(const Options& o, std::ostream& out) {
  auto tree = load_tree(o);
  auto minsup = threshold(o.minsup, "minsup");
  auto minconf = threshold(o.minconf, "minconf");
  if (o.resume.empty())
    throw UsageError("--resume <snapshot> is required");
  auto state = StreamState::restore(read_file(o.resume), tree);
  print_state_tables(out, state, minsup, minconf, o.prune);
  if (o.stats)
    out << fmt::format("#stats\tn={}\tcounters={}\n", state.n(), state.counter_total());
  return kExitOk;
}

int cmd_mine_constrained(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  auto tree = load_tree(o);
  auto minsup = threshold(o.minsup, "minsup");
  auto minconf = threshold(o.minconf, "minconf");
  auto strategy = configure([&] { return parse_strategy(o.strategy); });
  std::optional<ConstraintExpr> b;
  if (!o.constraint.empty())
    b = configure([&] { return parse_constraint(o.constraint, *tree); });

  auto text = read_input(o.input, in);
  std::istringstream source(text);
  TransactionReader reader(source, *tree, o.lenient);
  std::vector<Transaction> data;
  while (auto t = reader.next())
    data.push_back(std::move(*t));
  drain_warnings(reader.warnings(), err);

  auto start = Clock::now();
  out << kFrequentHeader;
  if (data.empty()) {
    err << "warning: empty dataset, nothing to mine\n";
    out << kRuleHeader;
    return kExitOk;
  }
  auto phase1 = b ? mine_constrained(data, *tree, *b, minsup, strategy) : mine_frequent(data, minsup);
  std::uint64_t counted = 0;
  auto table = complete_subset_supports(data, phase1.table, &counted);
  auto rules = b ? rules_from_table(table, minconf, *b, *tree) : rules_from_table(table, minconf);
  if (o.prune)
    rules = prune_redundant(rules);

  std::size_t frequent = 0;
  for (const auto& [items, entry] : table.entries)
    if (entry.frequent) {
      ++frequent;
      print_frequent(out, "-", items, entry.count, table.dataset_size);
    }
  out << kRuleHeader;
  print_rules(out, rules);
  if (o.stats)
    out << fmt::format("#stats\tstrategy={}\tphase1_candidates={}\tphase1_passes={}\tphase2_counted={}"
                       "\tselected={}\tfrequent={}\trules={}\twall_ms={}\n",
                       b ? to_string(strategy) : "unconstrained", phase1.stats.candidates, phase1.stats.passes,
                       counted, phase1.stats.selected.size(), frequent, rules.size(), elapsed_ms(start));
  return kExitOk;
}

int cmd_temporal(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  auto tree = load_tree(o);
  if (o.class1.empty() || o.class2.empty())
    throw UsageError("--class1 and --class2 are required");
  auto c1 = configure([&] { return tree->resolve(o.class1); });
  auto c2 = configure([&] { return tree->resolve(o.class2); });
  auto minconf = configure([&] { return parse_rational(o.minconf); });
  if (minconf < 0 || minconf > 1)
    throw UsageError(fmt::format("minconf must be in [0, 1], got '{}'", o.minconf));

  std::vector<TemporalPattern> patterns;
  if (o.patterns == "all") {
    patterns.assign(std::begin(kAllPatterns), std::end(kAllPatterns));
  } else {
    std::stringstream ss(o.patterns);
    std::string part;
    while (std::getline(ss, part, ',')) {
      auto p = parse_pattern(part);
      if (!p)
        throw UsageError(fmt::format("unknown pattern '{}'", part));
      patterns.push_back(*p);
    }
  }

  auto events = load_events(read_input(o.input, in), *tree);
  auto result = mine_temporal(events, *tree, c1, c2, patterns, o.min_count, minconf);
  drain_warnings(result.warnings, err);
  out << "# class1\tclass2\tvalue1\tvalue2\tpattern\tcount\tjoin_size\tsupport\tconfidence\n";
  for (const auto& r : result.rules)
    out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.class1.str(), r.class2.str(), r.value1, r.value2,
                       to_string(r.pattern), r.count, r.join_size, format_decimal(r.support()),
                       format_decimal(r.confidence()));
  if (o.stats)
    out << fmt::format("#stats\trules={}\n", result.rules.size());
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out, std::ostream& err) {
  auto tree = load_tree(o);
  if (o.warn_dit < 0)
    throw UsageError("--warn-dit must be non-negative");
  auto report = metrics_report(*tree, o.warn_dit);
  out << "# path\tlabel\tdit\tnoc\tflagged\n";
  std::size_t flagged = 0;
  for (const auto& m : report.nodes) {
    flagged += m.flagged;
    out << fmt::format("{}\t{}\t{}\t{}\t{}\n", m.code.str(), m.label, m.dit, m.noc, m.flagged ? 1 : 0);
  }
  out << fmt::format("#summary\tnodes={}\tmax_dit={}\tmax_noc={}\tmean_dit={}\twarn_dit={}\tflagged={}\n",
                     report.nodes.size(), report.max_dit, report.max_noc, format_decimal(report.mean_dit),
                     report.warn_threshold, flagged);
  if (flagged > 0)
    err << fmt::format("warning: {} nodes have depth of inheritance >= {}\n", flagged, report.warn_threshold);
  return kExitOk;
}

int cmd_generate(const Options& o, std::ostream& out) {
  GeneratorConfig config;
  config.seed = o.seed;
  config.fanout = o.fanout;
  config.depth = o.depth;
  config.items = o.items;
  config.transactions = o.transactions;
  config.avg_items = o.avg_items;
  config.skew = o.skew;
  config.timestamps = o.timestamps;
  for (const auto& p : o.plants)
    config.plants.push_back(configure([&] { return parse_plant(p); }));
  auto tree = configure([&] { return generate_taxonomy(config); });
  configure([&] { TransactionGenerator check(tree, config); });

  if (!o.taxonomy_out.empty())
    write_output(o.taxonomy_out, serialize_taxonomy(tree), out);
  if (o.output == "-") {
    generate_stream(tree, config, out);
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f)
      throw UsageError(fmt::format("cannot write '{}'", o.output));
    generate_stream(tree, config, f);
  }
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  bool stream = o.mode == "all" || o.mode == "stream";
  bool constrained = o.mode == "all" || o.mode == "constrained";
  out << "# section\tkey\tvalue\n";
  std::vector<std::string> summary;
  if (stream) {
    StreamBenchConfig config;
    config.seed = o.seed;
    config.transactions = o.transactions;
    config.sic = o.sic;
    auto r = configure([&] { return run_stream_bench(config); });
    std::string sic;
    for (const auto& s : r.sic)
      sic += (sic.empty() ? "" : ",") + s;
    out << fmt::format("stream\tsic\t{}\n", sic);
    out << fmt::format("stream\ttransactions\t{}\n", r.transactions);
    out << fmt::format("stream\ttouches_horm\t{}\n", r.touches_horm);
    out << fmt::format("stream\ttouches_mhorm\t{}\n", r.touches_mhorm);
    out << fmt::format("stream\ttouch_ratio\t{}\n", format_decimal(r.touch_ratio()));
    out << fmt::format("stream\treduced_fraction\t{}\n", format_decimal(r.reduced_fraction()));
    out << fmt::format("stream\tcounts_agree\t{}\n", r.counts_agree ? 1 : 0);
    out << fmt::format("stream\twall_ms_horm\t{:.3f}\n", r.wall_ms_horm);
    out << fmt::format("stream\twall_ms_mhorm\t{:.3f}\n", r.wall_ms_mhorm);
    summary.push_back("touch_ratio=" + format_decimal(r.touch_ratio()));
    summary.push_back("reduced_fraction=" + format_decimal(r.reduced_fraction()));
  }
  if (constrained) {
    ConstrainedBenchConfig config;
    config.seed = o.seed;
    config.minsup = threshold(o.minsup, "minsup");
    auto r = configure([&] { return run_constrained_bench(config); });
    out << fmt::format("constrained\tfrequent_total\t{}\n", r.frequent_total);
    for (const auto& c : r.cases) {
      auto tag = format_decimal(c.target, 2);
      out << fmt::format("constrained@{}\tconstraint\t{}\n", tag, c.constraint);
      out << fmt::format("constrained@{}\tselectivity\t{}\n", tag, format_decimal(c.selectivity));
      out << fmt::format("constrained@{}\tcandidates_discard\t{}\n", tag, c.discard_candidates);
      out << fmt::format("constrained@{}\tcandidates_selected\t{}\n", tag, c.selected_candidates);
      out << fmt::format("constrained@{}\tcandidates_direct\t{}\n", tag, c.direct_candidates);
      out << fmt::format("constrained@{}\tcandidate_ratio\t{}\n", tag, format_decimal(c.candidate_ratio()));
      out << fmt::format("constrained@{}\ttables_agree\t{}\n", tag, c.tables_agree ? 1 : 0);
      out << fmt::format("constrained@{}\twall_ms_discard\t{:.3f}\n", tag, c.wall_ms_discard);
      out << fmt::format("constrained@{}\twall_ms_selected\t{:.3f}\n", tag, c.wall_ms_selected);
      out << fmt::format("constrained@{}\twall_ms_direct\t{:.3f}\n", tag, c.wall_ms_direct);
      summary.push_back(fmt::format("selectivity@{}={}", tag, format_decimal(c.selectivity)));
      summary.push_back(fmt::format("candidate_ratio@{}={}", tag, format_decimal(c.candidate_ratio())));
    }
  }
  out << "#summary";
  for (const auto& s : summary)
    out << '\t' << s;
  out << '\n';
  return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Hierarchical association rule mining over transaction streams", "hmine"};
  app.require_subcommand(1);

  auto taxonomy = [&](CLI::App* c) {
    c->add_option("--taxonomy", o.taxonomy, "Taxonomy file (<path>\\t<label> per line)");
    c->add_option("--fanout-bound", o.fanout_bound, "Maximum children per node")->check(CLI::Range(1u, 1u << 20));
  };
  auto thresholds = [&](CLI::App* c) {
    c->add_option("--minsup", o.minsup, "Minimum support, decimal or fraction");
    c->add_option("--minconf", o.minconf, "Minimum confidence, decimal or fraction");
    c->add_flag("--prune", o.prune, "Emit only the non-redundant rule basis");
  };
  auto input = [&](CLI::App* c) {
    c->add_option("--input", o.input, "Input file, '-' for standard input");
    c->add_flag("--lenient", o.lenient, "Drop unknown items with a warning instead of failing");
  };

  auto* generate = app.add_subcommand("generate", "Write a synthetic taxonomy and transaction stream");
  generate->add_option("--seed", o.seed);
  generate->add_option("--fanout", o.fanout)->check(CLI::Range(1u, 64u));
  generate->add_option("--depth", o.depth)->check(CLI::Range(1u, 8u));
  generate->add_option("--items", o.items, "Leaves in use (0 = all)");
  generate->add_option("--transactions", o.transactions);
  generate->add_option("--avg-items", o.avg_items)->check(CLI::Range(1u, 1000u));
  generate->add_option("--skew", o.skew, "Zipf exponent over item ranks (0 = uniform)")->check(CLI::Range(0u, 8u));
  generate->add_option("--plant", o.plants, "Sibling classes first:second:probability");
  generate->add_flag("--timestamps", o.timestamps);
  generate->add_option("--taxonomy-out", o.taxonomy_out);
  generate->add_option("--output", o.output, "Stream file, '-' for standard output");

  auto* mine_stream = app.add_subcommand("mine-stream", "Count a transaction stream in one pass");
  taxonomy(mine_stream);
  input(mine_stream);
  thresholds(mine_stream);
  mine_stream->add_option("--sic", o.sic, "Classes of interest, comma separated");
  mine_stream->add_option("--algo", o.algo)->check(CLI::IsMember({"horm", "mhorm"}));
  mine_stream->add_option("--bitmask-bound", o.bitmask_bound)->check(CLI::Range(1u, kMaxBitmaskBound));
  mine_stream->add_option("--snapshot-out", o.snapshot_out);
  mine_stream->add_option("--resume", o.resume);
  mine_stream->add_flag("--stats", o.stats);

  auto* rules = app.add_subcommand("rules", "Emit frequent subsets and rules from a snapshot");
  taxonomy(rules);
  thresholds(rules);
  rules->add_option("--resume", o.resume, "Snapshot file");
  rules->add_flag("--stats", o.stats);

  auto* constrained = app.add_subcommand("mine-constrained", "Mine itemsets satisfying a boolean item constraint");
  taxonomy(constrained);
  input(constrained);
  thresholds(constrained);
  constrained->add_option("--constraint", o.constraint, "e.g. \"(1 & 2) | !3\"");
  constrained->add_option("--strategy", o.strategy)->check(CLI::IsMember({"selected", "direct", "discard"}));
  constrained->add_flag("--stats", o.stats);

  auto* temporal = app.add_subcommand("temporal", "Mine interval relations between two classes");
  taxonomy(temporal);
  temporal->add_option("--input", o.input, "Event file, '-' for standard input");
  temporal->add_option("--class1", o.class1);
  temporal->add_option("--class2", o.class2);
  temporal->add_option("--patterns", o.patterns, "Comma separated, or 'all'");
  temporal->add_option("--min-count", o.min_count);
  temporal->add_option("--minconf", o.minconf);
  temporal->add_flag("--stats", o.stats);

  auto* metrics = app.add_subcommand("metrics", "Depth of inheritance and number of children per node");
  taxonomy(metrics);
  metrics->add_option("--warn-dit", o.warn_dit);

  auto* bench = app.add_subcommand("bench", "Compare counting strategies on generated workloads");
  bench->add_option("--mode", o.mode)->check(CLI::IsMember({"all", "stream", "constrained"}));
  bench->add_option("--seed", o.seed);
  bench->add_option("--transactions", o.transactions);
  bench->add_option("--sic", o.sic);
  bench->add_option("--minsup", o.minsup);
  bench->add_flag("--stats", o.stats);

  std::vector<std::string> argv_storage{"hmine"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage)
    argv.push_back(a.c_str());

  // Subcommand-specific defaults.
  bool transactions_given = false;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    transactions_given = bench->count("--transactions") > 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (bench->parsed()) {
    if (!transactions_given)
      o.transactions = StreamBenchConfig{}.transactions;
    if (bench->count("--minsup") == 0)
      o.minsup = "0.01";
  }

  try {
    if (generate->parsed())
      return cmd_generate(o, out);
    if (mine_stream->parsed())
      return cmd_mine_stream(o, in, out, err);
    if (rules->parsed())
      return cmd_rules(o, out);
    if (constrained->parsed())
      return cmd_mine_constrained(o, in, out, err);
    if (temporal->parsed())
      return cmd_temporal(o, in, out, err);
    if (metrics->parsed())
      return cmd_metrics(o, out, err);
    if (bench->parsed())
      return cmd_bench(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    if (e.line() > 0)
      err << fmt::format("error: line {}: {}\n", e.line(), e.what());
    else
      err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

} // namespace hmine
