/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace invsyn {

// Exact arithmetic everywhere; no floating point is used anywhere in the
// reasoning core.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat & q) { return boost::multiprecision::numerator(q); }
inline Int den(const Rat & q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rat & q) { return den(q) == 1; }

inline Int gcd(const Int & a, const Int & b) { return boost::multiprecision::gcd(a, b); }
inline Int lcm(const Int & a, const Int & b) { return boost::multiprecision::lcm(a, b); }

// Floor division (rounds toward negative infinity, unlike cpp_int's /).
inline Int floor_div(const Int & a, const Int & b)
{
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int floor_rat(const Rat & q) { return floor_div(num(q), den(q)); }

// Euclidean remainder in [0, |b|).
inline Int emod(const Int & a, const Int & b)
{
  Int r = a % b;
  if (r < 0) r += boost::multiprecision::abs(b);
  return r;
}

inline std::string to_string(const Rat & q)
{
  if (is_integer(q)) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

}  // namespace invsyn
