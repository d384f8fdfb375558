/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace overlapix {

// All reported overlap quantities are exact rationals. Values like 1/3 or
// 109/20 must survive equality tests (= 0, = 1) and repeated summation
// without drift, so no floating point anywhere on this path.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den) {
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt rational_num(const Rational& r) {
  return boost::multiprecision::numerator(r);
}

inline BigInt rational_den(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

/// Canonical "num/den" rendering (normalized, denominator always shown).
std::string to_fraction_string(const Rational& r);

/// Fixed-point decimal rendering with `places` digits after the point,
/// rounded half away from zero. Deterministic by construction.
std::string to_decimal_string(const Rational& r, int places);

/// Parse "num/den", "num", or a plain decimal such as "0.25".
Rational parse_rational(const std::string& text);

double to_double(const Rational& r);

} // namespace overlapix
