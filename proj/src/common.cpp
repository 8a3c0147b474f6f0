#include "hmine/common.hpp"

#include <charconv>

#include <fmt/format.h>

namespace hmine {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t offset)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, what) : what), line_(line), offset_(offset) {}

namespace {

std::int64_t parse_int(std::string_view s, const std::string& whole) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + whole + "'");
  return v;
}

} // namespace

Rational parse_rational(const std::string& text) {
  std::string_view s = text;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto den = parse_int(s.substr(slash + 1), text);
    if (den == 0)
      throw std::invalid_argument("zero denominator: '" + text + "'");
    return Rational(parse_int(s.substr(0, slash), text), den);
  }
  auto dot = s.find('.');
  if (dot == std::string_view::npos)
    return Rational(parse_int(s, text));
  auto frac = s.substr(dot + 1);
  if (frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string_view::npos)
    throw std::invalid_argument("not a number: '" + text + "'");
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i)
    scale *= 10;
  auto whole = s.substr(0, dot);
  bool negative = !whole.empty() && whole.front() == '-';
  std::int64_t ip = (whole.empty() || whole == "-") ? 0 : parse_int(whole, text);
  std::int64_t fp = frac.empty() ? 0 : parse_int(frac, text);
  std::int64_t num = (negative ? -1 : 1) * (std::abs(ip) * scale + fp);
  return Rational(num, scale);
}

std::string format_decimal(Rational r, int digits) {
  // Exact rounding to `digits` places; avoids platform-dependent float printing.
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i)
    scale *= 10;
  __int128 num = static_cast<__int128>(r.numerator()) * scale;
  __int128 den = r.denominator();
  bool negative = num < 0;
  if (negative)
    num = -num;
  __int128 q = (2 * num + den) / (2 * den);
  auto whole = static_cast<std::int64_t>(q / scale);
  auto frac = static_cast<std::int64_t>(q % scale);
  return fmt::format("{}{}.{:0{}}", negative ? "-" : "", whole, frac, digits);
}

} // namespace hmine
