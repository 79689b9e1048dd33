#pragma once

#include "dioph/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dioph {

enum class GrowthMode { strict, relaxed };
enum class Regime { lattice, spectrum };

const char* growth_name(GrowthMode m);
GrowthMode parse_growth(const std::string& s);

struct ParamSet {
    int d = 1;
    Rational gamma;
    std::vector<Rational> betas;
    GrowthMode growth = GrowthMode::strict;
    int stages = 1;
    unsigned long base = 2;

    // s = (d+1)γ + Σβ_j
    Rational dimension() const;
    const Rational& beta() const { return betas.at(0); }
};

// Throws ConstraintViolation naming the failed inequality.
ParamSet validate_params(const ParamSet& p, Regime regime = Regime::lattice);

// lcm of the denominators of γ and all β_j; every q_i is base^(v·k).
unsigned long structure_denominator(const ParamSet& p);

struct StageSequence {
    BigInt base;
    unsigned long structure = 1;
    std::vector<BigInt> q;              // q[0] is stage 1
    std::vector<unsigned long> exps;    // q[i] == base^exps[i]
    std::vector<bool> compliant;        // stage obeys the strict growth bound
    GrowthMode mode = GrowthMode::strict;
    bool custom = false;

    std::size_t size() const { return q.size(); }
    // 1-based stage access.
    const BigInt& at(int i) const { return q.at(static_cast<std::size_t>(i - 1)); }
    // q_i^e, which must be an integer.
    BigInt power(int i, const Rational& e) const;
};

// Default integer budget for next_q, in bits.
constexpr unsigned long kDefaultBudgetBits = 1UL << 14;

// Smallest admissible base power after prev for stage i.
BigInt next_q(const BigInt& prev, const ParamSet& p, int i,
              unsigned long budget_bits = kDefaultBudgetBits);

// Builds q_1..q_m. A given q1 must itself be an admissible base power.
StageSequence make_sequence(const ParamSet& p, std::optional<BigInt> q1 = std::nullopt,
                            unsigned long budget_bits = kDefaultBudgetBits);

// Explicit moduli; each must be a power of the base with integral q^β_j.
// Stages that break the strict bound are flagged, not rejected.
StageSequence sequence_from_list(const ParamSet& p, const std::vector<BigInt>& qs);

// True iff stage i (>= 2) satisfies q_i > q_{i-1}^{10di} and q_i^{γ+β_j} > q_{i-1}.
bool strict_bound_holds(const BigInt& prev, const BigInt& q, const ParamSet& p, int i);

enum class WindowKind { standard, nongeometric, custom };

struct PrimeWindow {
    Rational lo, hi;
    std::vector<std::uint64_t> primes;
    WindowKind kind = WindowKind::custom;
    double surrogate = 0;  // hi / ln hi

    bool empty() const { return primes.empty(); }
    std::size_t count() const { return primes.size(); }
    bool contains(std::uint64_t p) const;
};

// Primes p with lo < p <= hi. Segmented sieve.
PrimeWindow primes_in_window(const Rational& lo, const Rational& hi);

// (q^γ/2, q^γ]
PrimeWindow standard_window(const BigInt& q, const Rational& gamma);

// All primes <= n.
std::vector<std::uint64_t> sieve_primes(std::uint64_t n);

// Plain trial division; used as an oracle and for one-off checks.
bool is_prime_trial(std::uint64_t n);

}  // namespace dioph
