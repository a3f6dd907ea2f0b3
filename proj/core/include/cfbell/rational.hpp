#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace cfbell {

using Rational = boost::rational<std::int64_t>;

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Parses "p", "-p" or "p/q". Throws DomainError on malformed input.
Rational parse_rational(const std::string& text);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace cfbell
