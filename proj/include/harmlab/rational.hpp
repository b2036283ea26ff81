#pragma once

// Exact rational arithmetic for exponent bookkeeping. All regularity
// thresholds, Sogge exponents and estimate exponents are small fractions,
// so boost::rational over long long has plenty of headroom.

#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace harmlab {

using Rational = boost::rational<long long>;

inline Rational rat(long long num, long long den = 1) { return Rational(num, den); }

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Parses "p", "p/q" or a plain decimal like "4.25" into an exact rational.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    long long num = std::stoll(s.substr(0, slash));
    long long den = std::stoll(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return Rational(num, den);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(s), 1);
  std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
  if (tail.size() > 12) throw std::invalid_argument("parse_rational: too many digits");
  bool neg = !head.empty() && head[0] == '-';
  long long ip = head.empty() || head == "-" ? 0 : std::stoll(head);
  long long den = 1;
  for (size_t i = 0; i < tail.size(); ++i) den *= 10;
  long long fp = tail.empty() ? 0 : std::stoll(tail);
  Rational mag = Rational(std::abs(ip), 1) + Rational(fp, den);
  return neg ? -mag : mag;
}

}  // namespace harmlab
