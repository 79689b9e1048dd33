#include "dioph/lattice.hpp"
#include "dioph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace dioph {

const char* mode_name(StageMode m)
{
    switch (m) {
    case StageMode::all_H: return "all_H";
    case StageMode::primes: return "primes";
    case StageMode::primes_excluding: return "primes_excluding";
    case StageMode::nongeometric: return "nongeometric";
    }
    return "?";
}

StageMode parse_mode(const std::string& s)
{
    if (s == "all_H") return StageMode::all_H;
    if (s == "primes") return StageMode::primes;
    if (s == "primes_excluding") return StageMode::primes_excluding;
    if (s == "nongeometric") return StageMode::nongeometric;
    throw Error(ErrorKind::ConstraintViolation, "lattice", "unknown stage mode " + s);
}

void IntervalSet::push(const std::vector<Rational>& c, std::uint64_t tag)
{
    for (const auto& x : c) coords.push_back(x);
    tags.push_back(tag);
}

namespace {

int lex_cmp(const IntervalSet& s, std::size_t a, std::size_t b)
{
    for (int j = 0; j < s.dim; ++j) {
        int c = cmp(s.at(a, j), s.at(b, j));
        if (c) return c;
    }
    return 0;
}

}  // namespace

void IntervalSet::canonicalize()
{
    const std::size_t n = size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        int c = lex_cmp(*this, a, b);
        return c < 0 || (c == 0 && tags[a] < tags[b]);
    });
    std::vector<Rational> nc;
    std::vector<std::uint64_t> nt;
    nc.reserve(coords.size());
    nt.reserve(n);
    std::size_t last = n;
    for (std::size_t k : idx) {
        if (last != n && lex_cmp(*this, last, k) == 0) continue;
        for (int j = 0; j < dim; ++j) nc.push_back(at(k, j));
        nt.push_back(tags[k]);
        last = k;
    }
    coords = std::move(nc);
    tags = std::move(nt);
}

bool IntervalSet::is_canonical() const
{
    for (std::size_t i = 1; i < size(); ++i)
        if (lex_cmp(*this, i - 1, i) >= 0) return false;
    return true;
}

std::vector<Range> IntervalSet::components() const
{
    if (dim != 1) throw Error(ErrorKind::ConstraintViolation, "lattice", "components needs d=1");
    std::vector<Range> out;
    for (std::size_t i = 0; i < size(); ++i) {
        Rational a = at(i) - radius, b = at(i) + radius;
        if (!out.empty() && a <= out.back().second) {
            if (b > out.back().second) out.back().second = b;
        } else {
            out.emplace_back(a, b);
        }
    }
    return out;
}

std::vector<Range> merge_ranges(std::vector<Range> rs)
{
    std::sort(rs.begin(), rs.end(), [](const Range& x, const Range& y) { return x.first < y.first; });
    std::vector<Range> out;
    for (auto& r : rs) {
        if (!out.empty() && r.first <= out.back().second) {
            if (r.second > out.back().second) out.back().second = r.second;
        } else {
            out.push_back(r);
        }
    }
    return out;
}

namespace {

struct Generator {
    BigInt H;
    std::uint64_t prime;  // 0 when H is not a window prime
};

std::vector<Generator> generators(int i, const ParamSet& ps, const StageSequence& qs, StageMode mode,
                                  const PrimeWindow* window)
{
    std::vector<Generator> gens;
    if (mode == StageMode::all_H) {
        BigInt hmax = floor_power(qs.at(i), ps.gamma);
        for (BigInt H = 1; H <= hmax; ++H) gens.push_back({H, 0});
        return gens;
    }
    PrimeWindow w;
    if (window) {
        w = *window;
    } else if (mode == StageMode::nongeometric) {
        throw Error(ErrorKind::ConstraintViolation, "lattice", "nongeometric mode needs an explicit window");
    } else {
        w = standard_window(qs.at(i), ps.gamma);
    }
    if (w.empty())
        throw Error(ErrorKind::EmptyStage, "lattice", "prime window empty at stage " + std::to_string(i));
    for (auto p : w.primes) gens.push_back({from_u64(p), p});
    return gens;
}

BigInt mults(const BigInt& g, const BigInt& lo, const BigInt& hi)
{
    if (hi < lo) return 0;
    BigInt a, b;
    BigInt lm1 = lo - 1;
    mpz_fdiv_q(a.get_mpz_t(), hi.get_mpz_t(), g.get_mpz_t());
    mpz_fdiv_q(b.get_mpz_t(), lm1.get_mpz_t(), g.get_mpz_t());
    return a - b;
}

// 128-bit view of a range, used when every numerator product fits.
struct FastRange {
    bool ok = false;
    bool a_neg = false, b_over = false;
    bool a_open = false, b_open = false;
    __int128 an = 0, ad = 1, bn = 0, bd = 1;
    int bits = 0;  // max numerator bit length
};

bool small_i128(const BigInt& z, __int128& out)
{
    if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 120) return false;
    std::uint64_t words[2] = {0, 0};
    std::size_t cnt = 0;
    mpz_export(words, &cnt, -1, sizeof(std::uint64_t), 0, 0, z.get_mpz_t());
    out = (static_cast<__int128>(words[1]) << 64) | words[0];
    return true;
}

FastRange fast_range(const Rational& a, const Rational& b, bool a_open, bool b_open)
{
    FastRange f;
    f.a_open = a_open;
    f.b_open = b_open;
    f.a_neg = a < 0;
    f.b_over = b > 1;
    if (!f.a_neg && !(small_i128(a.get_num(), f.an) && small_i128(a.get_den(), f.ad))) return f;
    if (!f.b_over && !(small_i128(b.get_num(), f.bn) && small_i128(b.get_den(), f.bd))) return f;
    int ba = f.a_neg ? 0 : static_cast<int>(mpz_sizeinbase(a.get_num_mpz_t(), 2));
    int bb = f.b_over ? 0 : static_cast<int>(mpz_sizeinbase(b.get_num_mpz_t(), 2));
    f.bits = std::max(ba, bb);
    f.ok = true;
    return f;
}

inline __int128 floor_div(__int128 n, __int128 d)  // d > 0, n >= -d
{
    return n >= 0 ? n / d : -((-n + d - 1) / d);
}

// Count of numerators m in the range over denominator D, m not in pZ when p != 0.
// Returns false when the products would not fit.
bool fast_count(const FastRange& f, std::uint64_t D, std::uint64_t p, bool exclude, __int128& out)
{
    if (!f.ok || f.bits + (64 - __builtin_clzll(D | 1)) > 125) return false;
    const __int128 Dz = D;
    __int128 lo, hi;
    if (f.a_neg) {
        lo = 0;
    } else {
        __int128 t = f.an * Dz;
        lo = f.a_open ? t / f.ad + 1 : (t + f.ad - 1) / f.ad;
    }
    if (f.b_over) {
        hi = Dz;
    } else {
        __int128 t = f.bn * Dz;
        hi = f.b_open ? (t + f.bd - 1) / f.bd - 1 : t / f.bd;
    }
    if (lo < 0) lo = 0;
    if (hi > Dz) hi = Dz;
    if (hi < lo) {
        out = 0;
        return true;
    }
    __int128 n = hi - lo + 1;
    if (p && exclude) {
        const __int128 P = p;
        n -= floor_div(hi, P) - floor_div(lo - 1, P);
    }
    out = n;
    return true;
}

BigInt big_from_i128(__int128 v)
{
    BigInt hi = from_u64(static_cast<std::uint64_t>(v >> 64));
    BigInt lo = from_u64(static_cast<std::uint64_t>(v));
    return (hi << 64) + lo;
}

// Numerator bounds of m/D inside the range, clamped to [0, D].
void numerator_bounds(const BigInt& D, const Rational& a, const Rational& b, bool a_open, bool b_open, BigInt& lo,
                      BigInt& hi)
{
    BigInt t = a.get_num() * D;
    if (a_open) {
        mpz_fdiv_q(lo.get_mpz_t(), t.get_mpz_t(), a.get_den_mpz_t());
        lo += 1;
    } else {
        mpz_cdiv_q(lo.get_mpz_t(), t.get_mpz_t(), a.get_den_mpz_t());
    }
    t = b.get_num() * D;
    if (b_open) {
        mpz_cdiv_q(hi.get_mpz_t(), t.get_mpz_t(), b.get_den_mpz_t());
        hi -= 1;
    } else {
        mpz_fdiv_q(hi.get_mpz_t(), t.get_mpz_t(), b.get_den_mpz_t());
    }
    if (lo < 0) lo = 0;
    if (hi > D) hi = D;
}

}  // namespace

IntervalSet build_stage(int i, const ParamSet& ps, const StageSequence& qs, StageMode mode, const PrimeWindow* window,
                        const std::vector<Range>* clip, std::size_t cap)
{
    const int d = ps.d;
    IntervalSet out;
    out.dim = d;
    out.q = qs.at(i);
    out.radius = Rational(1) / Rational(out.q);
    out.stage = i;
    out.mode = mode;

    std::vector<BigInt> Q;
    for (const auto& b : ps.betas) Q.push_back(qs.power(i, b));

    const auto gens = generators(i, ps, qs, mode, window);
    const bool exclude = mode == StageMode::primes_excluding || mode == StageMode::nongeometric;
    if (clip && d != 1) throw Error(ErrorKind::ConstraintViolation, "lattice", "clip needs d=1");

    std::vector<Range> ranges;
    if (clip) {
        for (const auto& r : *clip) {
            Rational a = r.first < 0 ? Rational(0) : r.first;
            Rational b = r.second > 1 ? Rational(1) : r.second;
            if (a <= b) ranges.emplace_back(a, b);
        }
        ranges = merge_ranges(ranges);
    } else {
        ranges.emplace_back(Rational(0), Rational(1));
    }

    // Size guard before touching any rational.
    BigInt estimate = 0;
    for (const auto& g : gens) {
        if (d == 1) {
            for (const auto& r : ranges) estimate += ceil_q((r.second - r.first) * Rational(g.H * Q[0])) + 1;
        } else {
            BigInt prod = 1;
            for (int j = 0; j < d; ++j) prod *= g.H * Q[static_cast<std::size_t>(j)] + 1;
            estimate += prod;
        }
        if (estimate > BigInt(static_cast<unsigned long>(cap)))
            throw Error(ErrorKind::Overflow, "lattice",
                        "stage " + std::to_string(i) + " has more than " + std::to_string(cap) + " centers");
    }

    for (const auto& g : gens) {
        const BigInt pz = g.prime ? from_u64(g.prime) : BigInt(0);
        if (d == 1) {
            const BigInt D = g.H * Q[0];
            for (const auto& r : ranges) {
                BigInt lo, hi;
                numerator_bounds(D, r.first, r.second, false, false, lo, hi);
                for (BigInt m = lo; m <= hi; ++m) {
                    bool on_lattice = g.prime && m % pz == 0;
                    if (exclude && on_lattice) continue;
                    Rational c(m, D);
                    c.canonicalize();
                    out.push({c}, on_lattice ? 0 : g.prime);
                }
            }
            continue;
        }
        std::vector<BigInt> m(static_cast<std::size_t>(d), BigInt(0));
        std::vector<Rational> c(static_cast<std::size_t>(d));
        std::function<void(int)> rec = [&](int j) {
            if (j == d) {
                bool on_lattice = g.prime != 0;
                if (g.prime)
                    for (const auto& x : m)
                        if (x % pz != 0) on_lattice = false;
                if (exclude && on_lattice) return;
                for (int k = 0; k < d; ++k) {
                    c[static_cast<std::size_t>(k)] = Rational(m[static_cast<std::size_t>(k)], g.H * Q[static_cast<std::size_t>(k)]);
                    c[static_cast<std::size_t>(k)].canonicalize();
                }
                out.push(c, on_lattice ? 0 : g.prime);
                return;
            }
            const BigInt top = g.H * Q[static_cast<std::size_t>(j)];
            for (BigInt x = 0; x <= top; ++x) {
                m[static_cast<std::size_t>(j)] = x;
                rec(j + 1);
            }
        };
        rec(0);
    }
    out.canonicalize();
    if (out.empty()) throw Error(ErrorKind::EmptyStage, "lattice", "no centers at stage " + std::to_string(i));
    return out;
}

PruneResult prune_separated(const IntervalSet& stage, int i, const ParamSet& ps, const StageSequence& qs)
{
    PruneResult res;
    const int d = stage.dim;
    const BigInt& q = qs.at(i);
    std::vector<BigInt> Q;
    for (const auto& b : ps.betas) Q.push_back(qs.power(i, b));

    const Rational s = ps.dimension();
    Rational eps = Rational(1, static_cast<unsigned long>(i));
    if (Rational(d) - s < eps) eps = Rational(d) - s;
    if (eps <= 0) eps = Rational(1, static_cast<unsigned long>(i));

    {
        double lq = log2_big(q);
        double lg = ps.gamma.get_d() * lq * std::log(2.0);
        double num = std::exp2(Rational(s - eps).get_d() * lq);
        res.removal_surrogate = lg > 0 ? num / (lg * lg) : num;
    }

    IntervalSet out = stage;
    out.coords.clear();
    out.tags.clear();

    auto on_common_lattice = [&](std::size_t k) {
        for (int j = 0; j < d; ++j) {
            Rational x = stage.at(k, j) * Rational(Q[static_cast<std::size_t>(j)]);
            if (x.get_den() != 1) return false;
        }
        return true;
    };

    if (d == 1) {
        res.threshold_exponent = Rational(2) * ps.gamma + ps.beta();
        res.threshold = std::exp2(-res.threshold_exponent.get_d() * log2_big(q));
        for (std::size_t k = 0; k < stage.size(); ++k) {
            if (on_common_lattice(k)) {
                ++res.removed;
                continue;
            }
            out.push({stage.at(k)}, stage.tags[k]);
        }
        res.survivors = std::move(out);
        return res;
    }

    res.threshold_exponent = (s + eps) / Rational(d);
    res.threshold = std::exp2(-res.threshold_exponent.get_d() * log2_big(q));
    const Rational neg = -res.threshold_exponent;
    auto below = [&](const Rational& delta) { return cmp_power(abs(delta), q, neg) < 0; };

    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < stage.size(); ++k) {
        if (on_common_lattice(k))
            ++res.removed;
        else
            keep.push_back(k);
    }
    // keep is sorted by first coordinate since stage is canonical.
    std::vector<bool> drop(keep.size(), false);
    for (std::size_t a = 0; a < keep.size(); ++a) {
        for (std::size_t b = a + 1; b < keep.size(); ++b) {
            Rational dx = stage.at(keep[b], 0) - stage.at(keep[a], 0);
            if (!below(dx)) break;
            if (stage.tags[keep[a]] == stage.tags[keep[b]]) continue;
            bool close = true;
            for (int j = 1; j < d && close; ++j) close = below(stage.at(keep[b], j) - stage.at(keep[a], j));
            if (close) drop[a] = drop[b] = true;
        }
    }
    std::vector<Rational> c(static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < keep.size(); ++a) {
        if (drop[a]) {
            ++res.removed;
            continue;
        }
        for (int j = 0; j < d; ++j) c[static_cast<std::size_t>(j)] = stage.at(keep[a], j);
        out.push(c, stage.tags[keep[a]]);
    }
    res.survivors = std::move(out);
    return res;
}

IntervalSet intersect_stages(const IntervalSet& prev, const IntervalSet& next)
{
    if (prev.dim != next.dim) throw Error(ErrorKind::ConstraintViolation, "lattice", "dimension mismatch");
    if (!(next.radius < prev.radius))
        throw Error(ErrorKind::ConstraintViolation, "lattice", "next.scale<prev.scale");
    const int d = next.dim;
    const Rational& R = prev.radius;
    IntervalSet out = next;
    out.coords.clear();
    out.tags.clear();

    std::vector<Rational> c(static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < next.size(); ++k) {
        const Rational& x0 = next.at(k, 0);
        // first prev center with first coordinate >= x0 - R
        std::size_t lo = 0, hi = prev.size();
        Rational key = x0 - R;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (prev.at(mid, 0) < key)
                lo = mid + 1;
            else
                hi = mid;
        }
        bool inside = false;
        for (std::size_t m = lo; m < prev.size() && !inside; ++m) {
            if (prev.at(m, 0) > x0 + R) break;
            inside = true;
            for (int j = 1; j < d && inside; ++j) inside = abs(prev.at(m, j) - next.at(k, j)) <= R;
        }
        if (!inside) continue;
        for (int j = 0; j < d; ++j) c[static_cast<std::size_t>(j)] = next.at(k, j);
        out.push(c, next.tags[k]);
    }
    if (out.empty()) throw Error(ErrorKind::EmptyIntersection, "lattice", "no child inside any parent");
    return out;
}

namespace {

// Cells k with [k δ, (k+1) δ) meeting [a, b] in positive measure.
void cell_range(const Rational& a, const Rational& b, const Rational& delta, BigInt& lo, BigInt& hi)
{
    lo = floor_q(a / delta);
    hi = ceil_q(b / delta) - 1;
}

}  // namespace

BigInt cover_count(const IntervalSet& set, const Rational& delta)
{
    if (delta <= 0) throw Error(ErrorKind::ConstraintViolation, "lattice", "delta>0");
    if (set.empty()) return 0;
    const Rational zero(0), one(1);
    auto clipped = [&](const Rational& c, Rational& a, Rational& b) {
        a = c - set.radius;
        b = c + set.radius;
        if (a < zero) a = zero;
        if (b > one) b = one;
        return a < b;
    };

    if (set.dim == 1) {
        std::vector<std::pair<BigInt, BigInt>> cells;
        for (const auto& r : set.components()) {
            Rational a = r.first < zero ? zero : r.first;
            Rational b = r.second > one ? one : r.second;
            if (!(a < b)) continue;
            BigInt lo, hi;
            cell_range(a, b, delta, lo, hi);
            cells.emplace_back(lo, hi);
        }
        std::sort(cells.begin(), cells.end());
        BigInt total = 0;
        bool open = false;
        BigInt cl, ch;
        for (auto& [lo, hi] : cells) {
            if (open && lo <= ch + 1) {
                if (hi > ch) ch = hi;
                continue;
            }
            if (open) total += ch - cl + 1;
            cl = lo;
            ch = hi;
            open = true;
        }
        if (open) total += ch - cl + 1;
        return total;
    }

    std::set<std::vector<BigInt>> cells;
    const int d = set.dim;
    for (std::size_t k = 0; k < set.size(); ++k) {
        std::vector<BigInt> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
        bool ok = true;
        for (int j = 0; j < d && ok; ++j) {
            Rational a, b;
            ok = clipped(set.at(k, j), a, b);
            if (ok) cell_range(a, b, delta, lo[static_cast<std::size_t>(j)], hi[static_cast<std::size_t>(j)]);
        }
        if (!ok) continue;
        std::vector<BigInt> cur = lo;
        std::function<void(int)> rec = [&](int j) {
            if (j == d) {
                cells.insert(cur);
                return;
            }
            for (BigInt x = lo[static_cast<std::size_t>(j)]; x <= hi[static_cast<std::size_t>(j)]; ++x) {
                cur[static_cast<std::size_t>(j)] = x;
                rec(j + 1);
            }
        };
        rec(0);
    }
    return BigInt(static_cast<unsigned long>(cells.size()));
}

Rational min_gap(const IntervalSet& set)
{
    if (set.dim != 1) throw Error(ErrorKind::ConstraintViolation, "lattice", "min_gap needs d=1");
    if (set.size() < 2) throw Error(ErrorKind::Degenerate, "lattice", "fewer than 2 intervals");
    Rational best = set.at(1) - set.at(0);
    for (std::size_t k = 2; k < set.size(); ++k) {
        Rational g = set.at(k) - set.at(k - 1);
        if (g < best) best = g;
    }
    return best;
}

DimensionEstimate box_dimension_estimate(const BigInt& cover, const BigInt& q)
{
    DimensionEstimate e;
    e.count = cover;
    e.q = q;
    e.estimate = log2_big(cover) / log2_big(q);
    return e;
}

std::vector<DimensionEstimate> box_dimension_estimate(const std::vector<IntervalSet>& sets, const StageSequence& qs)
{
    std::vector<DimensionEstimate> out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const BigInt& q = qs.q.at(i);
        out.push_back(box_dimension_estimate(cover_count(sets[i], Rational(1) / Rational(q)), q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Implicit stages

ImplicitStage ImplicitStage::build(int i, const ParamSet& ps, const StageSequence& qs, StageMode mode,
                                   const PrimeWindow* window)
{
    if (ps.d != 1) throw Error(ErrorKind::ConstraintViolation, "lattice", "implicit stages need d=1");
    ImplicitStage st;
    st.stage = i;
    st.q = qs.at(i);
    st.qbeta = qs.power(i, ps.beta());
    st.radius = Rational(1) / Rational(st.q);
    st.mode = mode;
    if (mode == StageMode::all_H) {
        if (floor_power(st.q, ps.gamma) != 1)
            throw Error(ErrorKind::ConstraintViolation, "lattice", "implicit all_H needs a single H");
        st.base_lattice = true;
        st.exclude_multiples = false;
        return st;
    }
    PrimeWindow w;
    if (window)
        w = *window;
    else if (mode == StageMode::nongeometric)
        throw Error(ErrorKind::ConstraintViolation, "lattice", "nongeometric mode needs an explicit window");
    else
        w = standard_window(st.q, ps.gamma);
    if (w.empty()) throw Error(ErrorKind::EmptyStage, "lattice", "prime window empty at stage " + std::to_string(i));
    st.primes = w.primes;
    st.base_lattice = mode == StageMode::primes;
    st.exclude_multiples = true;
    return st;
}

BigInt ImplicitStage::count_progression(std::uint64_t p, const Rational& a, const Rational& b, bool a_open,
                                        bool b_open) const
{
    const BigInt pz = p ? from_u64(p) : BigInt(1);
    const BigInt D = pz * qbeta;
    BigInt lo, hi;
    numerator_bounds(D, a, b, a_open, b_open, lo, hi);
    if (hi < lo) return 0;
    BigInt n = hi - lo + 1;
    if (p && exclude_multiples) n -= mults(pz, lo, hi);
    return n;
}

BigInt ImplicitStage::count(const Rational& a, const Rational& b, bool a_open, bool b_open) const
{
    BigInt total = 0;
    if (base_lattice) total += count_progression(0, a, b, a_open, b_open);
    const FastRange f = fast_range(a, b, a_open, b_open);
    const bool small_qb = fits_u64(qbeta) && qbeta < (BigInt(1) << 40);
    const std::uint64_t qb = small_qb ? to_u64(qbeta) : 0;
    __int128 acc = 0;
    for (auto p : primes) {
        __int128 n;
        if (small_qb && p < (1ULL << 23) && fast_count(f, p * qb, p, exclude_multiples, n))
            acc += n;
        else
            total += count_progression(p, a, b, a_open, b_open);
    }
    return total + big_from_i128(acc);
}

long double ImplicitStage::weighted_count(const Rational& a, const Rational& b, const std::vector<long double>& w,
                                          long double w_base, bool a_open, bool b_open) const
{
    if (w.size() != primes.size())
        throw Error(ErrorKind::ConstraintViolation, "lattice", "one weight per prime required");
    long double total = 0;
    if (base_lattice && w_base != 0) total += w_base * count_progression(0, a, b, a_open, b_open).get_d();
    const FastRange f = fast_range(a, b, a_open, b_open);
    const bool small_qb = fits_u64(qbeta) && qbeta < (BigInt(1) << 40);
    const std::uint64_t qb = small_qb ? to_u64(qbeta) : 0;
    for (std::size_t k = 0; k < primes.size(); ++k) {
        const auto p = primes[k];
        __int128 n;
        if (small_qb && p < (1ULL << 23) && fast_count(f, p * qb, p, exclude_multiples, n))
            total += w[k] * static_cast<long double>(n);
        else
            total += w[k] * static_cast<long double>(count_progression(p, a, b, a_open, b_open).get_d());
    }
    return total;
}

BigInt ImplicitStage::count_aligned(const Rational& a, const Rational& b, bool a_open, bool b_open) const
{
    auto one = [&](std::uint64_t p) {
        const BigInt pz = p ? from_u64(p) : BigInt(1);
        const BigInt D = pz * qbeta;
        BigInt lo, hi;
        numerator_bounds(D, a, b, a_open, b_open, lo, hi);
        if (hi < lo) return BigInt(0);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), D.get_mpz_t(), q.get_mpz_t());
        g = D / g;  // q*m/D integral  <=>  g | m
        BigInt n = mults(g, lo, hi);
        if (p && exclude_multiples) n -= mults(lcm_big(g, pz), lo, hi);
        return n;
    };
    BigInt total = 0;
    if (base_lattice) total += one(0);
    for (auto p : primes) total += one(p);
    return total;
}

std::vector<ImplicitStage::Center> ImplicitStage::enumerate(const Rational& a, const Rational& b, bool a_open,
                                                            bool b_open, std::size_t cap) const
{
    BigInt n = count(a, b, a_open, b_open);
    if (n > BigInt(static_cast<unsigned long>(cap)))
        throw Error(ErrorKind::Overflow, "lattice", "range holds " + n.get_str() + " centers");
    std::vector<Center> out;
    out.reserve(n.get_ui());
    auto one = [&](std::uint64_t p) {
        const BigInt pz = p ? from_u64(p) : BigInt(1);
        const BigInt D = pz * qbeta;
        BigInt lo, hi;
        numerator_bounds(D, a, b, a_open, b_open, lo, hi);
        for (BigInt m = lo; m <= hi; ++m) {
            if (p && exclude_multiples && m % pz == 0) continue;
            Rational c(m, D);
            c.canonicalize();
            out.push_back({c, (p && m % pz == 0) ? 0 : p});
        }
    };
    if (base_lattice) one(0);
    for (auto p : primes) one(p);
    std::sort(out.begin(), out.end(), [](const Center& x, const Center& y) { return x.c < y.c; });
    return out;
}

ImplicitStage::Center ImplicitStage::kth_center(const Rational& a, const Rational& b, const BigInt& k,
                                                bool a_open) const
{
    if (k < 1) throw Error(ErrorKind::ConstraintViolation, "lattice", "k>=1");
    const BigInt total = count(a, b, a_open);
    if (k > total) throw Error(ErrorKind::ConstraintViolation, "lattice", "k beyond range count");

    // Invariant: count(a, lo] < k <= count(a, hi], with a's openness.
    Rational lo = a, hi = b;
    BigInt flo = a_open ? BigInt(0) : count(a, a), fhi = total;
    if (flo >= k) return enumerate(a, a).front();

    const BigInt slack = BigInt(static_cast<unsigned long>(primes.size() + 2048));
    const unsigned long small = 1UL << 16;
    for (int iter = 0; iter < 200; ++iter) {
        if (fhi - flo <= BigInt(small)) {
            auto cs = enumerate(lo, hi, true, false, small + 16);
            BigInt idx = k - flo - 1;
            return cs.at(idx.get_ui());
        }
        // Density-guided probe slightly below and slightly above the target.
        Rational width = hi - lo;
        Rational span(fhi - flo);
        bool moved = false;
        for (int side = 0; side < 2; ++side) {
            BigInt want = k - flo + (side == 0 ? BigInt(-slack) : slack);
            if (want <= 0 || want >= fhi - flo) continue;
            Rational y = lo + width * Rational(want) / span;
            // Round to a dyadic grid fine enough for the bracket.
            unsigned long bits = static_cast<unsigned long>(std::max(8.0, -log2_q(width) + 64));
            BigInt scale = BigInt(1) << bits;
            Rational yr(floor_q(y * Rational(scale)), scale);
            yr.canonicalize();
            if (!(yr > lo && yr < hi)) continue;
            BigInt fy = count(a, yr, a_open);
            if (fy < k) {
                lo = yr;
                flo = fy;
            } else {
                hi = yr;
                fhi = fy;
            }
            moved = true;
        }
        if (!moved) {
            Rational mid = (lo + hi) / 2;
            BigInt fm = count(a, mid, a_open);
            if (fm < k) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
    }
    throw Error(ErrorKind::Degenerate, "lattice", "kth_center did not converge");
}

Rational ImplicitStage::separation_lower_bound() const
{
    if (primes.empty()) return Rational(1) / Rational(qbeta);
    BigInt p1 = from_u64(primes.back());
    if (primes.size() == 1) return Rational(1) / Rational(p1 * qbeta);
    BigInt p2 = from_u64(primes[primes.size() - 2]);
    return Rational(1) / Rational(p1 * p2 * qbeta);
}

IntervalSet ImplicitStage::to_interval_set(const std::vector<Range>& within, std::size_t cap) const
{
    IntervalSet out;
    out.dim = 1;
    out.radius = radius;
    out.stage = stage;
    out.q = q;
    out.mode = mode;
    for (const auto& r : merge_ranges(within)) {
        Rational a = r.first < 0 ? Rational(0) : r.first;
        Rational b = r.second > 1 ? Rational(1) : r.second;
        if (a > b) continue;
        for (auto& c : enumerate(a, b, false, false, cap)) out.push({c.c}, c.tag);
    }
    out.canonicalize();
    return out;
}

BigInt cover_count_within(const ImplicitStage& stage, const std::vector<Range>& parents)
{
    const Rational r = stage.radius;
    if (!(stage.separation_lower_bound() > Rational(4) * r))
        throw Error(ErrorKind::ConstraintViolation, "lattice", "implicit cover needs separation>4/q");
    const Rational zero(0), one(1);
    const Rational qr(stage.q);

    auto boundary_cells = [&](const Rational& c) -> BigInt {
        Rational a = c - r, b = c + r;
        if (a < zero) a = zero;
        if (b > one) b = one;
        return ceil_q(b * qr) - floor_q(a * qr);
    };

    BigInt total = 0;
    for (const auto& rg : merge_ranges(parents)) {
        Rational u = rg.first < zero ? zero : rg.first;
        Rational v = rg.second > one ? one : rg.second;
        if (u > v) continue;
        Rational L = u < r ? r : u;
        Rational R = v > one - r ? one - r : v;
        if (L <= R) total += BigInt(3) * stage.count(L, R) - stage.count_aligned(L, R);
        if (u < r) {
            Rational hi = v < r ? v : r;
            bool open = !(v < r);
            for (auto& c : stage.enumerate(u, hi, false, open)) total += boundary_cells(c.c);
        }
        if (v > one - r) {
            Rational lo = u > one - r ? u : one - r;
            bool open = !(u > one - r);
            for (auto& c : stage.enumerate(lo, v, open, false)) total += boundary_cells(c.c);
        }
    }
    return total;
}

Rational min_gap_fast(const ImplicitStage& stage)
{
    struct Frac {
        std::int64_t m, D;
    };
    std::vector<Frac> fs;
    const BigInt limit = BigInt(1) << 31;
    auto add = [&](std::uint64_t p) {
        const BigInt pz = p ? from_u64(p) : BigInt(1);
        const BigInt Dz = pz * stage.qbeta;
        if (Dz >= limit) throw Error(ErrorKind::Overflow, "lattice", "denominator beyond 2^31 in min_gap_fast");
        const std::int64_t D = to_i64(Dz);
        const auto P = static_cast<std::int64_t>(p);
        for (std::int64_t m = 0; m <= D; ++m) {
            if (p && stage.exclude_multiples && m % P == 0) continue;
            fs.push_back({m, D});
        }
    };
    if (stage.base_lattice) add(0);
    for (auto p : stage.primes) add(p);
    if (fs.size() < 2) throw Error(ErrorKind::Degenerate, "lattice", "fewer than 2 intervals");
    std::sort(fs.begin(), fs.end(), [](const Frac& x, const Frac& y) {
        return static_cast<__int128>(x.m) * y.D < static_cast<__int128>(y.m) * x.D;
    });
    // gap_k = (m2 D1 - m1 D2) / (D1 D2)
    __int128 bn = -1, bd = 1;
    for (std::size_t k = 1; k < fs.size(); ++k) {
        __int128 n = static_cast<__int128>(fs[k].m) * fs[k - 1].D - static_cast<__int128>(fs[k - 1].m) * fs[k].D;
        __int128 dd = static_cast<__int128>(fs[k].D) * fs[k - 1].D;
        if (n == 0) continue;  // same point from two progressions
        if (bn < 0 || n * bd < bn * dd) {
            bn = n;
            bd = dd;
        }
    }
    Rational g(big_from_i128(bn), big_from_i128(bd));
    g.canonicalize();
    return g;
}

void write_csv(std::ostream& os, const IntervalSet& set)
{
    os << "stage,mode,tag,radius";
    for (int j = 0; j < set.dim; ++j) os << ",c" << (j + 1);
    os << "\n";
    for (std::size_t k = 0; k < set.size(); ++k) {
        os << set.stage << ',' << mode_name(set.mode) << ',' << set.tags[k] << ',' << set.radius.get_str();
        for (int j = 0; j < set.dim; ++j) os << ',' << set.at(k, j).get_str();
        os << "\n";
    }
}

IntervalSet read_csv(std::istream& is)
{
    IntervalSet set;
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::ConstraintViolation, "lattice", "empty csv");
    set.dim = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 3;
    if (set.dim < 1) throw Error(ErrorKind::ConstraintViolation, "lattice", "bad csv header");
    std::vector<Rational> c(static_cast<std::size_t>(set.dim));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (static_cast<int>(f.size()) != 4 + set.dim)
            throw Error(ErrorKind::ConstraintViolation, "lattice", "bad csv row: " + line);
        set.stage = std::stoi(f[0]);
        set.mode = parse_mode(f[1]);
        std::uint64_t tag = std::stoull(f[2]);
        set.radius = Rational(f[3]);
        set.radius.canonicalize();
        for (int j = 0; j < set.dim; ++j) {
            c[static_cast<std::size_t>(j)] = Rational(f[static_cast<std::size_t>(4 + j)]);
            c[static_cast<std::size_t>(j)].canonicalize();
        }
        set.push(c, tag);
    }
    if (!set.radius.get_num().fits_ulong_p() || set.radius == 0) return set;
    set.q = set.radius.get_den() / set.radius.get_num();
    return set;
}

}  // namespace dioph
