#pragma once

// Exact scalars. Everything that is an endpoint, a weight or a modulus goes
// through GMP; doubles only appear in logs and transforms.

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace dioph {

using Rational = mpq_class;
using BigInt = mpz_class;

// Accepts "3", "-2/7", "0.25", "1e-3" is rejected (decimal or a/b only).
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);
std::string to_string(const BigInt& z);

BigInt ipow(const BigInt& base, unsigned long e);
Rational rpow(const Rational& base, unsigned long e);

BigInt floor_q(const Rational& q);
BigInt ceil_q(const Rational& q);

// floor(x^(1/n)) for x >= 0.
BigInt floor_root(const BigInt& x, unsigned long n);
// floor(Q^e) for e >= 0 rational, exact.
BigInt floor_power(const BigInt& Q, const Rational& e);
// true iff Q^e is an integer (e >= 0); stores it in out.
bool exact_power(const BigInt& Q, const Rational& e, BigInt& out);

// sign(v - Q^e) for v > 0, Q >= 1, any rational e.
int cmp_power(const Rational& v, const BigInt& Q, const Rational& e);

double log2_big(const BigInt& z);
double log2_q(const Rational& q);

std::uint64_t to_u64(const BigInt& z);
std::int64_t to_i64(const BigInt& z);
bool fits_u64(const BigInt& z);
bool fits_i64(const BigInt& z);
BigInt from_u64(std::uint64_t v);
BigInt from_i64(std::int64_t v);

BigInt lcm_big(const BigInt& a, const BigInt& b);

}  // namespace dioph
