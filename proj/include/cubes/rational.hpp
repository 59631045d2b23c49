#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace cubes {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) { return Rational(num, den); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& z) { return z.convert_to<double>(); }

inline std::string to_string(const Rational& q) { return q.str(); }

inline BigInt to_big(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 m = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  BigInt z = static_cast<std::uint64_t>(m >> 64);
  z <<= 64;
  z += static_cast<std::uint64_t>(m);
  return neg ? BigInt(-z) : z;
}

inline BigInt big_pow(const BigInt& base, unsigned exp) { return boost::multiprecision::pow(base, exp); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace cubes
