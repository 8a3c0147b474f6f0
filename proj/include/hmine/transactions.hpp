#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmine/stream.hpp"

namespace hmine {

/// One transaction per line: `[ts=<int>;]item,item,...`. Items are
/// taxonomy paths or labels and must be leaves. A blank line is an empty
/// transaction; lines starting with '#' are skipped (nullopt).
///
/// Unknown or non-leaf items throw DataError, or are dropped with a note
/// appended to `warnings` when `lenient` is set. Duplicates are merged.
std::optional<Transaction> parse_transaction_line(std::string_view line, const ClassificationTree& tree,
                                                  std::uint64_t seq, bool lenient = false,
                                                  std::vector<std::string>* warnings = nullptr);

std::vector<Transaction> parse_transactions(std::string_view text, const ClassificationTree& tree,
                                            bool lenient = false, std::vector<std::string>* warnings = nullptr);

std::string format_transaction(const Transaction& t);

/// Pulls transactions off a stream one line at a time.
class TransactionReader {
public:
  TransactionReader(std::istream& in, const ClassificationTree& tree, bool lenient = false,
                    std::uint64_t first_seq = 0)
      : in_(in), tree_(tree), lenient_(lenient), seq_(first_seq) {}

  std::optional<Transaction> next();
  std::size_t line() const { return line_; }
  std::vector<std::string>& warnings() { return warnings_; }

private:
  std::istream& in_;
  const ClassificationTree& tree_;
  bool lenient_;
  std::uint64_t seq_;
  std::size_t line_ = 0;
  std::string buf_;
  std::vector<std::string> warnings_;
};

} // namespace hmine
