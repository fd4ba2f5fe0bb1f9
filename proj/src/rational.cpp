#include "aara/rational.hpp"

#include <stdexcept>

namespace aara {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rational(BigInt(s.substr(0, slash)), den);
  }
  bool neg = s[0] == '-';
  std::string whole = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
  std::string frac = s.substr(dot + 1);
  if (whole.empty()) whole = "0";
  for (char c : whole + frac)
    if (c < '0' || c > '9') throw std::invalid_argument("bad rational literal: " + s);
  BigInt den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  Rational r(BigInt(whole + frac), den);
  return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

BigInt binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (long i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

Rational factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return Rational(r);
}

}  // namespace aara
