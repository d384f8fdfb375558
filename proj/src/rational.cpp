/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix/rational.hpp"

#include <cstddef>

#include "overlapix/error.hpp"

namespace overlapix {

std::string to_fraction_string(const Rational& r) {
  return rational_num(r).str() + "/" + rational_den(r).str();
}

std::string to_decimal_string(const Rational& r, int places) {
  BigInt num = rational_num(r);
  BigInt den = rational_den(r);
  bool negative = num < 0;
  if (negative) num = -num;

  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;

  // scaled = round(|r| * 10^places), half away from zero
  BigInt scaled = (num * scale * 2 + den) / (den * 2);

  BigInt whole = scaled / scale;
  BigInt frac = scaled % scale;

  std::string out = whole.str();
  if (places > 0) {
    std::string f = frac.str();
    out += "." + std::string(static_cast<std::size_t>(places) - f.size(), '0') + f;
  }
  if (negative && scaled != 0) out = "-" + out;
  return out;
}

Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw_error(ErrorKind::Format, "rational with zero denominator: " + text);
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      BigInt den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      return Rational(BigInt(digits), den);
    }
    return Rational(BigInt(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw_error(ErrorKind::Format, "not a rational: '" + text + "'");
  }
}

double to_double(const Rational& r) {
  return r.convert_to<double>();
}

} // namespace overlapix
