#include "mdplv/rational.hpp"

#include <cctype>

namespace mdplv {

namespace {

std::optional<BigInt> parse_integer(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) return std::nullopt;
  BigInt value = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
    value = value * 10 + (text[i] - '0');
  }
  return negative ? -value : value;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto num = parse_integer(text);
    if (!num) return std::nullopt;
    return Rational(*num);
  }
  auto num = parse_integer(text.substr(0, slash));
  auto den = parse_integer(text.substr(slash + 1));
  if (!num || !den || *den == 0) return std::nullopt;
  return Rational(*num, *den);
}

std::string format_rational(const Rational& r) {
  std::string out = numerator(r).str();
  if (denominator(r) != 1) {
    out += '/';
    out += denominator(r).str();
  }
  return out;
}

}  // namespace mdplv
