#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace mdplv {

// Exact rational probabilities. All model arithmetic that must be exact
// (distribution sums, canonical serialization) happens on this type; the
// iterative numerics convert to double once, up front.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// "p/q" or a plain integer "p". Lowest terms are not required on input.
std::optional<Rational> parse_rational(std::string_view text);

// Lowest terms, "p/q" with the slash omitted when the denominator is 1.
std::string format_rational(const Rational& r);

}  // namespace mdplv
