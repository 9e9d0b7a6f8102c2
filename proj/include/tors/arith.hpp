#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace tors {

using Integer = mpz_class;
using Rational = mpq_class;

// Ring interface for mpq_class; other element types provide the same free functions.
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline Rational zero_like(const Rational&) { return Rational(0); }
inline Rational one_like(const Rational&) { return Rational(1); }
Rational inverse(const Rational& x);

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b);

std::uint64_t euler_phi(std::uint64_t x);
int moebius(std::uint64_t x);
std::vector<std::uint64_t> divisors(std::uint64_t x);
std::vector<std::uint64_t> prime_factors(std::uint64_t x);
bool is_prime_u64(std::uint64_t x);

// Height of a rational number: max(|p|, |q|) in lowest terms.
Integer rational_height(const Rational& q);

}  // namespace tors
