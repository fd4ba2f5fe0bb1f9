#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace aara {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

// "3", "-5/2" and "2.5" are all accepted.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form, or "p" for integers.
std::string to_string(const Rational& q);

BigInt binomial(long n, long k);
Rational factorial(unsigned n);

}  // namespace aara
