#include "dioph/projections.hpp"
#include "dioph/errors.hpp"

#include <algorithm>
#include <functional>

namespace dioph {

namespace {

Rational qmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational qmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

void need(bool ok, const std::string& what)
{
    if (!ok) throw Error(ErrorKind::ConstraintViolation, "projections", what);
}

}  // namespace

ABCParams make_abc(const Rational& sA, const Rational& sB, const Rational& sC)
{
    for (const auto* s : {&sA, &sB, &sC}) need(*s > 0 && *s < 1, "s in (0,1)");
    need(sA - sB >= 0, "s_A-s_B>=0");
    need(sC > sA - sB, "s_C>s_A-s_B");
    ABCParams p{sA, sB, sC};
    need(p.gammaC() + p.betaC() < 1, "γ+β<1");
    return p;
}

std::vector<Rational> lattice_points(const BigInt& n)
{
    need(n >= 1, "lattice denominator >= 1");
    std::vector<Rational> out;
    for (BigInt m = 0; m <= n; ++m) {
        Rational c(m, n);
        c.canonicalize();
        out.push_back(c);
    }
    return out;
}

BigInt codim1_projection_cover(const std::vector<std::vector<Rational>>& factors, const std::vector<Rational>& normal,
                               const BigInt& q)
{
    need(!factors.empty() && factors.size() == normal.size(), "one normal coefficient per factor");
    std::vector<BigInt> cells;
    const Rational qr(q);
    std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t j, const Rational& acc) {
        if (j == factors.size()) {
            cells.push_back(floor_q(acc * qr));
            return;
        }
        for (const auto& y : factors[j]) rec(j + 1, acc + normal[j] * y);
    };
    rec(0, Rational(0));
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return BigInt(static_cast<unsigned long>(cells.size()));
}

BigInt sumset_cover(const std::vector<Rational>& A, const Rational& c, const std::vector<Rational>& B, const BigInt& q)
{
    return codim1_projection_cover({A, B}, {Rational(1), c}, q);
}

bool lattice_containment(const std::vector<Rational>& A, const Rational& c, const std::vector<Rational>& B,
                         const BigInt& scale)
{
    const Rational m = Rational(c.get_den()) * Rational(scale);
    for (const auto& a : A)
        for (const auto& b : B) {
            Rational v = (a + c * b) * m;
            v.canonicalize();
            if (v.get_den() != 1) return false;
        }
    return true;
}

ProjectionInstance make_projection_instance(std::vector<Rational> s, const Rational& t)
{
    need(!s.empty(), "at least one exponent");
    for (const auto& x : s) need(x > 0 && x < 1, "s in (0,1)");
    std::sort(s.begin(), s.end());
    ProjectionInstance inst;
    inst.d = static_cast<int>(s.size());
    inst.s = s;
    inst.t = t;
    Rational spread = 0;
    for (std::size_t j = 1; j < s.size(); ++j) {
        spread += s[j] - s[0];
        inst.betas.push_back(s[j] - s[0]);
    }
    inst.below_threshold = t <= spread;
    inst.gamma = qmax((t - spread) / inst.d, Rational(0));
    return inst;
}

Rational codim1_bound_exponent(const ProjectionInstance& inst)
{
    Rational total = 0, rest = 0;
    for (std::size_t j = 0; j < inst.s.size(); ++j) {
        total += inst.s[j];
        if (j) rest += inst.s[j];
    }
    if (inst.below_threshold) return rest;
    return (Rational(inst.d - 1) * total + inst.t) / inst.d;
}

Rational piecewise_f(const Rational& s1, const Rational& s2, const Rational& s3, const Rational& t)
{
    need(s1 >= s2 && s2 >= s3, "s1>=s2>=s3");
    if (t <= 1 + s1 - s2) return s1 + s3;
    return (s1 + s2 + t - 1) / 2 + s3;
}

Rational product_direction_bound(const Rational& s1, const Rational& s2, const Rational& s3, const Rational& t1,
                                 const Rational& t2)
{
    const Rational s[3] = {s1, s2, s3};
    const Rational t[2] = {t1, t2};
    Rational v = s1;
    for (int j = 0; j < 2; ++j) v += qmin(qmax((t[j] + s[j + 1] - s1) / 2, Rational(0)), s[j + 1]);
    return qmin(v, Rational(1));
}

RegimeReport regime_comparator(const Rational& s1, const Rational& s2, const Rational& s3, const std::vector<Rational>& ts)
{
    RegimeReport rep;
    const Rational S = s1 + s2 + s3;
    rep.wide = s1 + 2 * s3 > 1;
    for (const auto& t : ts) {
        RegimeRow r;
        r.t = t;
        r.average = (S + t) / 3;
        r.f = piecewise_f(s1, s2, s3, t);
        r.sum = S;
        r.value = qmin(qmin(r.average, r.f), qmin(r.sum, Rational(1)));
        if (r.value == r.average)
            r.active = "average";
        else if (r.value == r.f)
            r.active = "f";
        else if (r.value == r.sum)
            r.active = "sum";
        else
            r.active = "one";
        rep.rows.push_back(r);
    }
    const Rational brk = 1 + s1 - s2;
    const Rational c1 = 3 * (s1 + s3) - S;
    if (c1 > 0 && c1 <= brk) rep.crossings.push_back(c1);
    const Rational c2 = 3 - s1 - s2 - 4 * s3;
    if (c2 >= brk && c2 < 2) rep.crossings.push_back(c2);
    return rep;
}

}  // namespace dioph
