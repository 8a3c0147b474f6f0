#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace hmine {

using Rational = boost::rational<std::int64_t>;

/// Subset of a class's children; bit j stands for the j-th child.
using Mask = std::uint64_t;

/// Malformed input text. `line` is 1-based (0 when not line-oriented),
/// `offset` is a 0-based character position (npos when not applicable).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset = std::string::npos);

  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

private:
  std::size_t line_;
  std::size_t offset_;
};

/// Input that parsed but is inconsistent with the model (unknown item,
/// corrupted snapshot, ...).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses "0.4", "2/5", "1" into an exact rational.
Rational parse_rational(const std::string& text);

std::string format_decimal(Rational r, int digits = 6);

inline bool is_probability(Rational r) { return r > 0 && r <= 1; }

/// count/total >= threshold, without division.
inline bool meets(std::uint64_t count, std::uint64_t total, Rational threshold) {
  return static_cast<__int128>(count) * threshold.denominator() >=
         static_cast<__int128>(threshold.numerator()) * total;
}

} // namespace hmine
