#include "hmine/transactions.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

namespace hmine {

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

std::optional<Transaction> parse_transaction_line(std::string_view line, const ClassificationTree& tree,
                                                  std::uint64_t seq, bool lenient,
                                                  std::vector<std::string>* warnings) {
  line = trim(line);
  if (!line.empty() && line.front() == '#')
    return std::nullopt;
  Transaction t;
  t.seq = seq;
  if (line.starts_with("ts=")) {
    auto semi = line.find(';');
    if (semi == std::string_view::npos)
      throw DataError("timestamp prefix missing ';'");
    auto num = line.substr(3, semi - 3);
    std::int64_t ts = 0;
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), ts);
    if (num.empty() || ec != std::errc() || p != num.data() + num.size())
      throw DataError(fmt::format("bad timestamp '{}'", num));
    t.ts = ts;
    line = trim(line.substr(semi + 1));
  }
  if (line.empty())
    return t;

  std::size_t start = 0;
  while (start <= line.size()) {
    auto comma = line.find(',', start);
    auto field = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    start = comma == std::string_view::npos ? line.size() + 1 : comma + 1;
    if (field.empty())
      throw DataError("empty item in transaction");
    std::optional<ItemCode> code;
    std::string problem;
    try {
      code = tree.resolve(field);
      if (!tree.is_leaf(*code))
        problem = fmt::format("item '{}' is not a leaf", field);
    } catch (const DataError&) {
      problem = fmt::format("unknown item '{}'", field);
    }
    if (!problem.empty()) {
      if (!lenient)
        throw DataError(problem);
      if (warnings)
        warnings->push_back(fmt::format("transaction {}: dropped {}", seq, problem));
      continue;
    }
    t.items.push_back(std::move(*code));
  }
  std::sort(t.items.begin(), t.items.end());
  t.items.erase(std::unique(t.items.begin(), t.items.end()), t.items.end());
  return t;
}

std::vector<Transaction> parse_transactions(std::string_view text, const ClassificationTree& tree, bool lenient,
                                            std::vector<std::string>* warnings) {
  std::vector<Transaction> out;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    try {
      if (auto t = parse_transaction_line(line, tree, out.size(), lenient, warnings))
        out.push_back(std::move(*t));
    } catch (const DataError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

std::string format_transaction(const Transaction& t) {
  std::string out;
  if (t.ts)
    out += fmt::format("ts={};", *t.ts);
  out += to_string(t.items);
  return out;
}

std::optional<Transaction> TransactionReader::next() {
  while (std::getline(in_, buf_)) {
    ++line_;
    try {
      if (auto t = parse_transaction_line(buf_, tree_, seq_, lenient_, &warnings_)) {
        ++seq_;
        return t;
      }
    } catch (const DataError& e) {
      throw ParseError(e.what(), line_);
    }
  }
  return std::nullopt;
}

} // namespace hmine
