#include "dioph/params.hpp"
#include "dioph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dioph {

const char* growth_name(GrowthMode m) { return m == GrowthMode::strict ? "strict" : "relaxed"; }

GrowthMode parse_growth(const std::string& s)
{
    if (s == "strict") return GrowthMode::strict;
    if (s == "relaxed") return GrowthMode::relaxed;
    throw Error(ErrorKind::ConstraintViolation, "params", "growth mode must be strict|relaxed, got " + s);
}

Rational ParamSet::dimension() const
{
    Rational s = Rational(d + 1) * gamma;
    for (const auto& b : betas) s += b;
    return s;
}

ParamSet validate_params(const ParamSet& p, Regime regime)
{
    auto fail = [](const std::string& what) { return Error(ErrorKind::ConstraintViolation, "params", what); };
    if (p.d < 1) throw fail("d>=1");
    if (p.stages < 1) throw fail("stages>=1");
    if (p.base < 2) throw fail("base>=2");
    if (static_cast<int>(p.betas.size()) != p.d) throw fail("len(β)=d");
    if (p.gamma < 0) throw fail("γ>=0");
    for (const auto& b : p.betas)
        if (b < 0) throw fail("β>=0");
    if (regime == Regime::lattice) {
        for (const auto& b : p.betas) {
            Rational s = p.gamma + b;
            if (s <= 0) throw fail("γ+β>0");
            if (s >= 1) throw fail("γ+β<1");
        }
    } else {
        if (p.d != 1) throw fail("d=1 in spectrum mode");
        if (Rational(2) * p.gamma + p.beta() > 1) throw fail("2γ+β<=1");
    }
    return p;
}

unsigned long structure_denominator(const ParamSet& p)
{
    BigInt v = p.gamma.get_den();
    for (const auto& b : p.betas) v = lcm_big(v, b.get_den());
    if (!v.fits_ulong_p()) throw Error(ErrorKind::Overflow, "params", "structure denominator too large");
    return v.get_ui();
}

bool strict_bound_holds(const BigInt& prev, const BigInt& q, const ParamSet& p, int i)
{
    if (q <= prev) return false;
    if (q <= ipow(prev, 10UL * static_cast<unsigned long>(p.d) * static_cast<unsigned long>(i))) return false;
    for (const auto& b : p.betas) {
        Rational e = p.gamma + b;
        if (e <= 0) return false;
        // q^e > prev
        if (cmp_power(Rational(prev), q, e) >= 0) return false;
    }
    return true;
}

BigInt next_q(const BigInt& prev, const ParamSet& p, int i, unsigned long budget_bits)
{
    if (prev < 1) throw Error(ErrorKind::ConstraintViolation, "params", "prev>=1");
    const unsigned long v = structure_denominator(p);
    const BigInt base(p.base);
    const double lb = std::log2(static_cast<double>(p.base));

    // Jump close to the answer, then walk exactly.
    double need_bits = 0;
    if (p.growth == GrowthMode::strict) {
        need_bits = log2_big(prev) * 10.0 * p.d * i;
        for (const auto& b : p.betas) {
            double e = Rational(p.gamma + b).get_d();
            if (e > 0) need_bits = std::max(need_bits, log2_big(prev) / e);
        }
    } else {
        need_bits = 2.0 * log2_big(prev);
    }
    auto k = static_cast<unsigned long>(std::max(0.0, std::floor(need_bits / (lb * v)) - 2));
    if (k < 1) k = 1;

    for (;; ++k) {
        unsigned long e = v * k;
        if (static_cast<double>(e) * lb > static_cast<double>(budget_bits))
            throw Error(ErrorKind::Overflow, "params",
                        "stage " + std::to_string(i) + " modulus exceeds " + std::to_string(budget_bits) + " bits");
        BigInt q = ipow(base, e);
        if (q < 2) continue;
        bool ok = false;
        if (p.growth == GrowthMode::relaxed) {
            ok = q > prev * prev;
        } else if (i == 1 && prev == 1) {
            ok = true;
        } else {
            ok = strict_bound_holds(prev, q, p, i);
        }
        if (ok) return q;
    }
}

namespace {

unsigned long exponent_of(const BigInt& q, const BigInt& base)
{
    BigInt x = q;
    unsigned long e = 0;
    while (x > 1) {
        if (x % base != 0) return 0;
        x /= base;
        ++e;
    }
    return e;
}

}  // namespace

BigInt StageSequence::power(int i, const Rational& e) const
{
    BigInt out;
    if (!exact_power(at(i), e, out))
        throw Error(ErrorKind::ConstraintViolation, "params",
                    "q_" + std::to_string(i) + "^" + e.get_str() + " is not an integer");
    return out;
}

StageSequence make_sequence(const ParamSet& p, std::optional<BigInt> q1, unsigned long budget_bits)
{
    StageSequence s;
    s.base = BigInt(p.base);
    s.structure = structure_denominator(p);
    s.mode = p.growth;
    BigInt prev(1);
    for (int i = 1; i <= p.stages; ++i) {
        BigInt q;
        if (i == 1 && q1) {
            q = *q1;
        } else {
            q = next_q(prev, p, i, budget_bits);
        }
        unsigned long e = exponent_of(q, s.base);
        if (e == 0 || e % s.structure != 0)
            throw Error(ErrorKind::ConstraintViolation, "params",
                        "q=" + q.get_str() + " is not base^(v*k) with v=" + std::to_string(s.structure));
        s.q.push_back(q);
        s.exps.push_back(e);
        s.compliant.push_back(i == 1 || strict_bound_holds(prev, q, p, i));
        prev = q;
    }
    return s;
}

StageSequence sequence_from_list(const ParamSet& p, const std::vector<BigInt>& qs)
{
    StageSequence s;
    s.base = BigInt(p.base);
    s.structure = structure_denominator(p);
    s.mode = p.growth;
    s.custom = true;
    BigInt prev(1);
    int i = 1;
    for (const auto& q : qs) {
        unsigned long e = exponent_of(q, s.base);
        if (e == 0) throw Error(ErrorKind::ConstraintViolation, "params", "q=" + q.get_str() + " is not a base power");
        if (q <= prev) throw Error(ErrorKind::ConstraintViolation, "params", "q_i increasing");
        s.q.push_back(q);
        s.exps.push_back(e);
        s.compliant.push_back(i == 1 || strict_bound_holds(prev, q, p, i));
        for (const auto& b : p.betas) (void)s.power(i, b);
        prev = q;
        ++i;
    }
    return s;
}

bool PrimeWindow::contains(std::uint64_t p) const { return std::binary_search(primes.begin(), primes.end(), p); }

std::vector<std::uint64_t> sieve_primes(std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    if (n < 2) return out;
    std::vector<bool> composite(n + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

bool is_prime_trial(std::uint64_t n)
{
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

PrimeWindow primes_in_window(const Rational& lo, const Rational& hi)
{
    if (lo < 1 || !(lo < hi))
        throw Error(ErrorKind::ConstraintViolation, "params", "window needs 1 <= lo < hi");
    PrimeWindow w;
    w.lo = lo;
    w.hi = hi;
    double h = hi.get_d();
    w.surrogate = h > 1 ? h / std::log(h) : 0.0;

    BigInt a = floor_q(lo) + 1;  // p > lo
    BigInt b = floor_q(hi);      // p <= hi
    if (a > b) return w;
    if (!fits_u64(b) || b > (BigInt(1) << 50))
        throw Error(ErrorKind::Overflow, "params", "prime window upper end too large to sieve: " + b.get_str());
    std::uint64_t A = to_u64(a), B = to_u64(b);
    if (B - A > (1ULL << 30)) throw Error(ErrorKind::Overflow, "params", "prime window too wide to sieve");

    auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(B))) + 2;
    while (root * root > B) --root;
    std::vector<std::uint64_t> base = sieve_primes(root);

    const std::uint64_t seg = 1ULL << 22;
    std::vector<bool> composite;
    for (std::uint64_t start = A; start <= B; start += seg) {
        std::uint64_t end = std::min(B, start + seg - 1);
        composite.assign(end - start + 1, false);
        for (std::uint64_t p : base) {
            if (p * p > end) break;
            std::uint64_t first = std::max(p * p, (start + p - 1) / p * p);
            for (std::uint64_t j = first; j <= end; j += p) composite[j - start] = true;
        }
        for (std::uint64_t n = start; n <= end; ++n)
            if (n >= 2 && !composite[n - start]) w.primes.push_back(n);
        if (end == B) break;
    }
    return w;
}

PrimeWindow standard_window(const BigInt& q, const Rational& gamma)
{
    BigInt qg;
    Rational hi;
    if (exact_power(q, gamma, qg)) {
        hi = Rational(qg);
    } else {
        hi = Rational(floor_power(q, gamma));  // floor keeps p <= q^γ exact
    }
    Rational lo = Rational(qg) / 2;
    if (!exact_power(q, gamma, qg)) {
        // p > q^γ/2  <=>  2p > q^γ  <=>  (2p)^den > q^num; floor(q^γ)/2 is a safe
        // starting point, the exact filter follows.
        lo = Rational(floor_power(q, gamma)) / 2;
    }
    PrimeWindow w;
    if (hi <= 1) {
        w.lo = lo;
        w.hi = hi;
        w.kind = WindowKind::standard;
        return w;
    }
    if (lo < 1) lo = 1;
    w = primes_in_window(lo, hi);
    if (!exact_power(q, gamma, qg)) {
        std::vector<std::uint64_t> keep;
        for (auto p : w.primes)
            if (cmp_power(Rational(2 * p), q, gamma) > 0) keep.push_back(p);
        w.primes = std::move(keep);
    }
    w.kind = WindowKind::standard;
    return w;
}

}  // namespace dioph
