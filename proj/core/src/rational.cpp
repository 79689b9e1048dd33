#include "dioph/rational.hpp"
#include "dioph/errors.hpp"

#include <cmath>
#include <limits>

namespace dioph {

Rational parse_rational(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (c != ' ' && c != '\t') s += c;
    if (s.empty()) throw Error(ErrorKind::ConstraintViolation, "params", "empty number");

    auto bad = [&]() { return Error(ErrorKind::ConstraintViolation, "params", "bad number '" + text + "'"); };
    auto digits = [](const std::string& t) {
        if (t.empty()) return false;
        for (char c : t)
            if (c < '0' || c > '9') return false;
        return true;
    };

    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        s = s.substr(1);
    }

    Rational out;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        if (!digits(a) || !digits(b)) throw bad();
        BigInt den(b);
        if (den == 0) throw bad();
        out = Rational(BigInt(a), den);
    } else if (dot != std::string::npos) {
        std::string a = s.substr(0, dot), b = s.substr(dot + 1);
        if (a.empty()) a = "0";
        if (!digits(a) || (!b.empty() && !digits(b))) throw bad();
        BigInt scale = ipow(BigInt(10), b.size());
        out = Rational(BigInt(a) * scale + (b.empty() ? BigInt(0) : BigInt(b)), scale);
    } else {
        if (!digits(s)) throw bad();
        out = Rational(BigInt(s));
    }
    out.canonicalize();
    return neg ? Rational(-out) : out;
}

std::string to_string(const Rational& q) { return q.get_str(); }
std::string to_string(const BigInt& z) { return z.get_str(); }

BigInt ipow(const BigInt& base, unsigned long e)
{
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

Rational rpow(const Rational& base, unsigned long e)
{
    Rational r(ipow(base.get_num(), e), ipow(base.get_den(), e));
    r.canonicalize();
    return r;
}

BigInt floor_q(const Rational& q)
{
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

BigInt ceil_q(const Rational& q)
{
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

BigInt floor_root(const BigInt& x, unsigned long n)
{
    BigInt r;
    mpz_root(r.get_mpz_t(), x.get_mpz_t(), n);
    return r;
}

BigInt floor_power(const BigInt& Q, const Rational& e)
{
    if (e < 0) throw Error(ErrorKind::ConstraintViolation, "params", "negative exponent in floor_power");
    return floor_root(ipow(Q, e.get_num().get_ui()), e.get_den().get_ui());
}

bool exact_power(const BigInt& Q, const Rational& e, BigInt& out)
{
    BigInt x = ipow(Q, e.get_num().get_ui());
    BigInt r;
    int exact = mpz_root(r.get_mpz_t(), x.get_mpz_t(), e.get_den().get_ui());
    out = r;
    return exact != 0;
}

int cmp_power(const Rational& v, const BigInt& Q, const Rational& e)
{
    // v vs Q^(u/w)  <=>  v^w vs Q^u  (w > 0)
    unsigned long w = e.get_den().get_ui();
    BigInt u = e.get_num();
    Rational lhs = rpow(v, w);
    if (u >= 0) {
        Rational rhs(ipow(Q, u.get_ui()));
        return cmp(lhs, rhs);
    }
    BigInt au = -u;
    Rational prod = lhs * Rational(ipow(Q, au.get_ui()));
    return cmp(prod, Rational(1));
}

double log2_big(const BigInt& z)
{
    if (z <= 0) return -std::numeric_limits<double>::infinity();
    long ex = 0;
    double m = mpz_get_d_2exp(&ex, z.get_mpz_t());
    return std::log2(m) + static_cast<double>(ex);
}

double log2_q(const Rational& q) { return log2_big(q.get_num()) - log2_big(q.get_den()); }

bool fits_u64(const BigInt& z) { return z >= 0 && mpz_sizeinbase(z.get_mpz_t(), 2) <= 64; }

bool fits_i64(const BigInt& z)
{
    BigInt a = abs(z);
    return mpz_sizeinbase(a.get_mpz_t(), 2) <= 62;
}

std::uint64_t to_u64(const BigInt& z)
{
    if (!fits_u64(z)) throw Error(ErrorKind::Overflow, "params", "value exceeds 64 bits: " + z.get_str());
    std::uint64_t lo = mpz_getlimbn(z.get_mpz_t(), 0);
    return z == 0 ? 0 : lo;
}

std::int64_t to_i64(const BigInt& z)
{
    if (!fits_i64(z)) throw Error(ErrorKind::Overflow, "params", "value exceeds 62 bits: " + z.get_str());
    BigInt a = abs(z);
    auto v = static_cast<std::int64_t>(to_u64(a));
    return z < 0 ? -v : v;
}

BigInt from_u64(std::uint64_t v)
{
    BigInt r;
    mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    return r;
}

BigInt from_i64(std::int64_t v)
{
    if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
    return -from_u64(static_cast<std::uint64_t>(-(v + 1)) + 1);
}

BigInt lcm_big(const BigInt& a, const BigInt& b)
{
    BigInt r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

}  // namespace dioph
