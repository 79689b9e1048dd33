#include "dioph/measure.hpp"
#include "dioph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace dioph {

namespace {

const Rational kZero(0), kOne(1);

Rational qmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational qmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational rho_of(std::uint64_t tag)
{
    return tag ? Rational(1, static_cast<unsigned long>(tag - 1)) : Rational(1);
}

// First box of a canonical set with first coordinate >= v.
std::size_t lower_first(const IntervalSet& s, const Rational& v)
{
    std::size_t lo = 0, hi = s.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (s.at(mid, 0) < v)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

bool within(const IntervalSet& s, std::size_t k, const std::vector<Rational>& x, const Rational& reach)
{
    for (int j = 0; j < s.dim; ++j) {
        Rational diff = s.at(k, j) - x[static_cast<std::size_t>(j)];
        if (abs(diff) > reach) return false;
    }
    return true;
}

// Calls f(k) for every box whose center is within reach of x in every coordinate.
template <class F>
void for_each_near(const IntervalSet& s, const std::vector<Rational>& x, const Rational& reach, F&& f)
{
    for (std::size_t k = lower_first(s, x[0] - reach); k < s.size(); ++k) {
        if (s.at(k, 0) > x[0] + reach) break;
        if (within(s, k, x, reach)) f(k);
    }
}

std::vector<Rational> center_of(const IntervalSet& s, std::size_t k)
{
    std::vector<Rational> c(static_cast<std::size_t>(s.dim));
    for (int j = 0; j < s.dim; ++j) c[static_cast<std::size_t>(j)] = s.at(k, j);
    return c;
}

IntervalSet empty_like(const IntervalSet& s)
{
    IntervalSet out = s;
    out.coords.clear();
    out.tags.clear();
    return out;
}

// Groups the boxes of next under the first parent of prev containing them.
std::vector<std::vector<std::size_t>> group_children(const IntervalSet& prev, const IntervalSet& next)
{
    std::vector<std::vector<std::size_t>> kids(prev.size());
    for (std::size_t k = 0; k < next.size(); ++k) {
        auto c = center_of(next, k);
        std::size_t found = prev.size();
        for_each_near(prev, c, prev.radius, [&](std::size_t pk) {
            if (pk < found) found = pk;
        });
        if (found < prev.size()) kids[found].push_back(k);
    }
    return kids;
}

void check_sets(const std::vector<IntervalSet>& sets)
{
    if (sets.empty()) throw Error(ErrorKind::ConstraintViolation, "measure", "no stages");
    for (const auto& s : sets) {
        if (s.dim != sets[0].dim) throw Error(ErrorKind::ConstraintViolation, "measure", "mixed dimensions");
        if (!s.is_canonical()) throw Error(ErrorKind::ConstraintViolation, "measure", "stage sets must be canonical");
    }
    if (sets[0].empty()) throw Error(ErrorKind::EmptyParent, "measure", "stage 1 is empty");
}

MeasureTree build_tree(const std::vector<IntervalSet>& sets, bool uniform)
{
    check_sets(sets);
    MeasureTree t;
    t.dim = sets[0].dim;
    t.uniform = uniform;

    // Stage 1: every box is a child of the root.
    t.stages.push_back(sets[0]);
    t.parent.emplace_back(sets[0].size(), 0);
    if (uniform) {
        BigInt n = static_cast<unsigned long>(sets[0].size());
        t.child_count.push_back(n);
        t.weights.emplace_back(sets[0].size(), Rational(1) / Rational(n));
    } else {
        Rational z = 0;
        for (auto tag : sets[0].tags) z += rho_of(tag);
        std::vector<Rational> w;
        for (auto tag : sets[0].tags) w.push_back(rho_of(tag) / z);
        t.child_count.push_back(0);
        t.weights.push_back(std::move(w));
    }

    for (std::size_t i = 1; i < sets.size(); ++i) {
        const IntervalSet& prev = t.stages.back();
        const auto& pw = t.weights.back();
        auto kids = group_children(prev, sets[i]);

        std::size_t n = std::numeric_limits<std::size_t>::max();
        for (std::size_t pk = 0; pk < kids.size(); ++pk) {
            if (kids[pk].empty())
                throw Error(ErrorKind::EmptyParent, "measure",
                            "parent " + std::to_string(pk) + " of stage " + std::to_string(i) + " has no child");
            n = std::min(n, kids[pk].size());
        }

        // Children of consecutive parents stay sorted because parents are.
        std::vector<std::pair<std::size_t, std::size_t>> chosen;  // (child index, parent)
        std::vector<Rational> cw;
        for (std::size_t pk = 0; pk < kids.size(); ++pk) {
            if (uniform) {
                for (std::size_t c = 0; c < n; ++c) chosen.emplace_back(kids[pk][c], pk);
            } else {
                Rational z = 0;
                for (auto c : kids[pk]) z += rho_of(sets[i].tags[c]);
                for (auto c : kids[pk]) {
                    chosen.emplace_back(c, pk);
                    cw.push_back(pw[pk] * rho_of(sets[i].tags[c]) / z);
                }
            }
        }
        std::vector<std::size_t> order(chosen.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return chosen[a].first < chosen[b].first; });

        IntervalSet st = empty_like(sets[i]);
        std::vector<std::size_t> par;
        std::vector<Rational> w;
        const Rational leaf = uniform ? pw[0] / Rational(static_cast<unsigned long>(n)) : Rational(0);
        for (auto o : order) {
            st.push(center_of(sets[i], chosen[o].first), sets[i].tags[chosen[o].first]);
            par.push_back(chosen[o].second);
            w.push_back(uniform ? leaf : cw[o]);
        }
        t.stages.push_back(std::move(st));
        t.parent.push_back(std::move(par));
        t.weights.push_back(std::move(w));
        t.child_count.push_back(uniform ? BigInt(static_cast<unsigned long>(n)) : BigInt(0));
    }
    return t;
}

}  // namespace

std::size_t MeasureTree::ancestor(std::size_t k, int s) const
{
    for (int i = static_cast<int>(depth()); i > s; --i) k = parent[static_cast<std::size_t>(i - 1)][k];
    return k;
}

MeasureTree build_measure_tree(const std::vector<IntervalSet>& stage_sets) { return build_tree(stage_sets, true); }

MeasureTree build_weighted_tree(const std::vector<IntervalSet>& stage_sets) { return build_tree(stage_sets, false); }

Rational ball_mass(const MeasureTree& t, const std::vector<Rational>& x, const Rational& r)
{
    if (r <= 0) throw Error(ErrorKind::ConstraintViolation, "measure", "r>0");
    const IntervalSet& s = t.deepest();
    const auto& w = t.weights.back();
    Rational total = 0;
    std::size_t hits = 0;
    for_each_near(s, x, r + s.radius, [&](std::size_t k) {
        if (t.uniform)
            ++hits;
        else
            total += w[k];
    });
    if (t.uniform && hits) total = w[0] * Rational(static_cast<unsigned long>(hits));
    return total;
}

Rational interval_mass(const MeasureTree& t, const Rational& a, const Rational& b)
{
    if (t.dim != 1) throw Error(ErrorKind::ConstraintViolation, "measure", "interval_mass needs d=1");
    const IntervalSet& s = t.deepest();
    const auto& w = t.weights.back();
    const Rational& rho = s.radius;
    Rational total = 0;
    for (std::size_t k = lower_first(s, a - rho); k < s.size() && s.at(k) <= b + rho; ++k) {
        Rational lo = qmax(s.at(k) - rho, kZero), hi = qmin(s.at(k) + rho, kOne);
        Rational u = qmax(lo, a), v = qmin(hi, b);
        if (u >= v || lo >= hi) continue;
        total += w[k] * (v - u) / (hi - lo);
    }
    return total;
}

Rational progression_mass(const MeasureTree& t, int i, std::uint64_t p)
{
    if (i < 1 || i > static_cast<int>(t.depth())) throw Error(ErrorKind::ConstraintViolation, "measure", "stage out of range");
    const auto& s = t.stages[static_cast<std::size_t>(i - 1)];
    const auto& w = t.weights[static_cast<std::size_t>(i - 1)];
    Rational total = 0;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s.tags[k] == p) total += w[k];
    return total;
}

bool in_support(const MeasureTree& t, const std::vector<Rational>& x)
{
    bool hit = false;
    for_each_near(t.deepest(), x, t.deepest().radius, [&](std::size_t) { hit = true; });
    return hit;
}

void write_tree_csv(std::ostream& os, const MeasureTree& t)
{
    os << "stage,index,parent,tag,weight";
    for (int j = 0; j < t.dim; ++j) os << ",c" << (j + 1);
    os << "\n";
    for (std::size_t i = 0; i < t.depth(); ++i) {
        const auto& s = t.stages[i];
        for (std::size_t k = 0; k < s.size(); ++k) {
            os << (i + 1) << ',' << k << ',' << t.parent[i][k] << ',' << s.tags[k] << ',' << t.weights[i][k].get_str();
            for (int j = 0; j < t.dim; ++j) os << ',' << s.at(k, j).get_str();
            os << "\n";
        }
    }
}

double TreeModel::log2_mass(const std::vector<Rational>& x, const Rational& r) const
{
    Rational m = ball_mass(tree_, x, r);
    return m > 0 ? log2_q(m) : -std::numeric_limits<double>::infinity();
}

bool TreeModel::in_support(const std::vector<Rational>& x) const { return dioph::in_support(tree_, x); }

// ---------------------------------------------------------------------------

void ImplicitTree::attach_parents()
{
    const Rational& r1 = stage1_.radius;
    parents_.clear();
    for (std::size_t k = 0; k < stage1_.size(); ++k) {
        Parent P;
        P.lo = qmax(stage1_.at(k) - r1, kZero);
        P.hi = qmin(stage1_.at(k) + r1, kOne);
        if (k > 0 && parents_.back().hi >= P.lo) {
            P.lo = parents_.back().hi;
            P.lo_open = true;
        }
        P.cut = P.hi;
        parents_.push_back(P);
    }
    rho_.clear();
    for (auto p : stage2_.primes) rho_.push_back(1.0L / static_cast<long double>(p - 1));
}

ImplicitTree ImplicitTree::uniform(const IntervalSet& stage1, const ImplicitStage& stage2)
{
    if (stage1.dim != 1 || stage1.empty()) throw Error(ErrorKind::ConstraintViolation, "measure", "stage 1 must be a nonempty d=1 set");
    ImplicitTree t;
    t.uniform_ = true;
    t.stage1_ = stage1;
    t.stage2_ = stage2;
    t.attach_parents();
    t.n1_ = static_cast<unsigned long>(stage1.size());

    bool first = true;
    for (std::size_t k = 0; k < t.parents_.size(); ++k) {
        auto& P = t.parents_[k];
        BigInt avail = P.lo > P.hi ? BigInt(0) : stage2.count(P.lo, P.hi, P.lo_open);
        if (avail == 0)
            throw Error(ErrorKind::EmptyParent, "measure", "stage-1 box " + std::to_string(k) + " has no child");
        if (first || avail < t.n2_) t.n2_ = avail;
        first = false;
    }
    const Rational w1 = Rational(1) / Rational(t.n1_);
    for (auto& P : t.parents_) {
        P.cut = stage2.kth_center(P.lo, P.hi, t.n2_, P.lo_open).c;
        P.weight = w1;
    }
    return t;
}

ImplicitTree ImplicitTree::weighted(const IntervalSet& stage1, const ImplicitStage& stage2)
{
    if (stage1.dim != 1 || stage1.empty()) throw Error(ErrorKind::ConstraintViolation, "measure", "stage 1 must be a nonempty d=1 set");
    ImplicitTree t;
    t.uniform_ = false;
    t.stage1_ = stage1;
    t.stage2_ = stage2;
    t.attach_parents();
    t.n1_ = static_cast<unsigned long>(stage1.size());

    Rational z = 0;
    for (auto tag : stage1.tags) z += rho_of(tag);
    for (std::size_t k = 0; k < t.parents_.size(); ++k) {
        auto& P = t.parents_[k];
        P.weight = rho_of(stage1.tags[k]) / z;
        P.z = P.lo > P.hi ? 0.0L : stage2.weighted_count(P.lo, P.hi, t.rho_, 1.0L, P.lo_open);
        if (!(P.z > 0))
            throw Error(ErrorKind::EmptyParent, "measure", "stage-1 box " + std::to_string(k) + " has no child");
    }
    return t;
}

Rational ImplicitTree::leaf_weight() const
{
    if (!uniform_) throw Error(ErrorKind::ConstraintViolation, "measure", "leaf weight needs a uniform tree");
    return Rational(1) / Rational(n1_ * n2_);
}

namespace {

// Intersection of [a, b] with a parent's child range; false when empty.
bool clip_to(const Rational& a, const Rational& b, const Rational& lo, bool lo_open, const Rational& cut, Rational& u,
             bool& u_open, Rational& v)
{
    if (a > lo) {
        u = a;
        u_open = false;
    } else {
        u = lo;
        u_open = lo_open;
    }
    v = qmin(b, cut);
    return u < v || (u == v && !u_open);
}

}  // namespace

Rational ImplicitTree::ball_mass(const Rational& x, const Rational& r) const
{
    if (!uniform_) throw Error(ErrorKind::ConstraintViolation, "measure", "exact ball mass needs a uniform tree");
    if (r <= 0) throw Error(ErrorKind::ConstraintViolation, "measure", "r>0");
    const Rational a = x - r - stage2_.radius, b = x + r + stage2_.radius;
    BigInt hits = 0;
    for (const auto& P : parents_) {
        if (P.lo > b) break;
        Rational u, v;
        bool uo;
        if (clip_to(a, b, P.lo, P.lo_open, P.cut, u, uo, v)) hits += stage2_.count(u, v, uo);
    }
    return Rational(hits) * leaf_weight();
}

long double ImplicitTree::range_weight(const Parent& P, const Rational& a, const Rational& b) const
{
    Rational u, v;
    bool uo;
    if (!clip_to(a, b, P.lo, P.lo_open, P.cut, u, uo, v)) return 0;
    return static_cast<long double>(P.weight.get_d()) * stage2_.weighted_count(u, v, rho_, 1.0L, uo) / P.z;
}

long double ImplicitTree::ball_mass_approx(const Rational& x, const Rational& r) const
{
    if (uniform_) return static_cast<long double>(ball_mass(x, r).get_d());
    if (r <= 0) throw Error(ErrorKind::ConstraintViolation, "measure", "r>0");
    const Rational a = x - r - stage2_.radius, b = x + r + stage2_.radius;
    long double total = 0;
    for (const auto& P : parents_) {
        if (P.lo > b) break;
        total += range_weight(P, a, b);
    }
    return total;
}

double ImplicitTree::log2_mass(const std::vector<Rational>& x, const Rational& r) const
{
    if (uniform_) {
        Rational m = ball_mass(x.at(0), r);
        return m > 0 ? log2_q(m) : -std::numeric_limits<double>::infinity();
    }
    long double m = ball_mass_approx(x.at(0), r);
    return m > 0 ? static_cast<double>(std::log2(m)) : -std::numeric_limits<double>::infinity();
}

bool ImplicitTree::in_support(const std::vector<Rational>& x) const
{
    const Rational a = x.at(0) - stage2_.radius, b = x.at(0) + stage2_.radius;
    for (const auto& P : parents_) {
        if (P.lo > b) break;
        Rational u, v;
        bool uo;
        if (clip_to(a, b, P.lo, P.lo_open, P.cut, u, uo, v) && stage2_.count(u, v, uo) > 0) return true;
    }
    return false;
}

long double ImplicitTree::child_mass(std::size_t k, std::uint64_t p) const
{
    const Parent& P = parents_.at(k);
    if (uniform_) return static_cast<long double>(leaf_weight().get_d());
    long double rho = p ? 1.0L / static_cast<long double>(p - 1) : 1.0L;
    return static_cast<long double>(P.weight.get_d()) * rho / P.z;
}

long double ImplicitTree::parent_mass(std::size_t k) const { return static_cast<long double>(parents_.at(k).weight.get_d()); }

Rational ImplicitTree::progression_mass_exact(std::uint64_t p) const
{
    BigInt hits = 0;
    for (const auto& P : parents_) {
        if (P.lo > P.cut) continue;
        hits += stage2_.count_progression(p, P.lo, P.cut, P.lo_open);
    }
    return Rational(hits) * leaf_weight();
}

long double ImplicitTree::progression_mass(std::uint64_t p) const
{
    if (uniform_) return static_cast<long double>(progression_mass_exact(p).get_d());
    long double total = 0;
    for (std::size_t k = 0; k < parents_.size(); ++k) {
        const auto& P = parents_[k];
        if (P.lo > P.cut) continue;
        long double n = static_cast<long double>(stage2_.count_progression(p, P.lo, P.cut, P.lo_open).get_d());
        total += n * child_mass(k, p);
    }
    return total;
}

bool ImplicitTree::first_center(std::size_t k, std::uint64_t p, Rational& out) const
{
    const Parent& P = parents_.at(k);
    const BigInt pz = p ? from_u64(p) : BigInt(1);
    const BigInt D = pz * stage2_.qbeta;
    Rational t = P.lo * Rational(D);
    BigInt m = P.lo_open ? floor_q(t) + 1 : ceil_q(t);
    if (m < 0) m = 0;
    if (p && stage2_.exclude_multiples && m % pz == 0) ++m;
    Rational c(m, D);
    c.canonicalize();
    if (c > P.cut) return false;
    out = c;
    return true;
}

// ---------------------------------------------------------------------------

FrostmanStats frostman_fit(const MassModel& m, const std::vector<std::pair<std::vector<Rational>, Rational>>& samples,
                           double target, double tolerance)
{
    FrostmanStats st;
    st.target = target;
    st.tolerance = tolerance;
    st.min_slope = std::numeric_limits<double>::infinity();
    st.max_slope = -std::numeric_limits<double>::infinity();
    for (const auto& [x, r] : samples) {
        if (r <= 0 || r >= 1) throw Error(ErrorKind::ConstraintViolation, "measure", "sample radius must lie in (0,1)");
        FrostmanSample s;
        s.x = x;
        s.r = r;
        s.log2_mass = m.log2_mass(x, r);
        s.slope = s.log2_mass / log2_q(r);
        st.min_slope = std::min(st.min_slope, s.slope);
        st.max_slope = std::max(st.max_slope, s.slope);
        st.samples.push_back(std::move(s));
    }
    st.pass = !st.samples.empty() && st.min_slope >= target - tolerance;
    return st;
}

namespace {

void finish_lower(LowerCheck& lc, double log2_min_interval, double log2_q_i, double s, double gamma)
{
    lc.c_interval = std::exp2(log2_min_interval + (s + lc.eps) * log2_q_i);
    lc.c_progression = lc.progression_mass > 0
                           ? std::exp2(static_cast<double>(std::log2(lc.progression_mass)) + (gamma + lc.eps) * log2_q_i)
                           : 0.0;
    lc.pass = lc.intervals > 0 && lc.c_interval >= lc.c_floor && lc.c_progression >= lc.c_floor;
}

}  // namespace

LowerCheck frostman_lower_check(const MeasureTree& t, int i, std::uint64_t p, double s, double gamma, double c_floor,
                                double eps)
{
    if (t.dim != 1) throw Error(ErrorKind::ConstraintViolation, "measure", "lower check needs d=1");
    if (i < 1 || i > static_cast<int>(t.depth())) throw Error(ErrorKind::ConstraintViolation, "measure", "stage out of range");
    LowerCheck lc;
    lc.stage = i;
    lc.prime = p;
    lc.c_floor = c_floor;
    lc.eps = eps;
    const auto& st = t.stages[static_cast<std::size_t>(i - 1)];
    const Rational half = Rational(1) / (Rational(20) * Rational(st.q));
    bool first = true;
    for (std::size_t k = 0; k < st.size(); ++k) {
        if (st.tags[k] != p) continue;
        Rational m = interval_mass(t, st.at(k) - half, st.at(k) + half);
        if (first || m < lc.min_interval_mass) lc.min_interval_mass = m;
        first = false;
        ++lc.intervals;
    }
    lc.progression_mass = static_cast<long double>(progression_mass(t, i, p).get_d());
    double lmin = lc.min_interval_mass > 0 ? log2_q(lc.min_interval_mass) : -std::numeric_limits<double>::infinity();
    finish_lower(lc, lmin, log2_big(st.q), s, gamma);
    return lc;
}

LowerCheck frostman_lower_check(const ImplicitTree& t, std::uint64_t p, double s, double gamma, double c_floor, double eps)
{
    LowerCheck lc;
    lc.stage = t.stage2().stage;
    lc.prime = p;
    lc.c_floor = c_floor;
    lc.eps = eps;
    // A (10q)^{-1}-interval centered on a box keeps at least 1/20 of that box's
    // weight, clipped or not; the minimum over boxes is attained by the lightest child.
    long double lightest = -1;
    Rational c;
    for (std::size_t k = 0; k < t.parents(); ++k) {
        if (!t.first_center(k, p, c)) continue;
        long double w = t.child_mass(k, p);
        if (lightest < 0 || w < lightest) lightest = w;
        ++lc.intervals;
    }
    double lmin = -std::numeric_limits<double>::infinity();
    if (lc.intervals) {
        if (t.is_uniform()) {
            lc.min_interval_mass = t.leaf_weight() / Rational(20);
            lmin = log2_q(lc.min_interval_mass);
        } else {
            lc.min_interval_mass = Rational(static_cast<double>(lightest / 20));
            lmin = static_cast<double>(std::log2(lightest / 20));
        }
    }
    lc.progression_mass = t.progression_mass(p);
    finish_lower(lc, lmin, log2_big(t.stage2().q), s, gamma);
    return lc;
}

LocalDimSummary local_dimension_profile(const MassModel& m, const std::vector<std::vector<Rational>>& points,
                                        const std::vector<Rational>& scales, const std::vector<double>& weights)
{
    if (scales.empty()) throw Error(ErrorKind::ConstraintViolation, "measure", "no scales");
    for (std::size_t j = 0; j < scales.size(); ++j) {
        if (scales[j] <= 0 || scales[j] >= 1) throw Error(ErrorKind::ConstraintViolation, "measure", "scales must lie in (0,1)");
        if (j && scales[j] >= scales[j - 1]) throw Error(ErrorKind::ConstraintViolation, "measure", "scales must decrease");
    }
    if (!weights.empty() && weights.size() != points.size())
        throw Error(ErrorKind::ConstraintViolation, "measure", "one weight per point");

    LocalDimSummary out;
    out.inf_slope = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < points.size(); ++n) {
        const auto& x = points[n];
        if (!m.in_support(x)) throw Error(ErrorKind::PointOutsideSupport, "measure", "sample point " + std::to_string(n));
        LocalDimSample s;
        s.x = x;
        s.scales = scales;
        s.weight = weights.empty() ? 1.0 : weights[n];
        for (const auto& r : scales) {
            double lm = m.log2_mass(x, r);
            s.log2_masses.push_back(lm);
            s.slopes.push_back(lm / log2_q(r));
        }
        if (scales.size() == 1)
            s.scale_slope = s.slopes[0];
        else
            s.scale_slope = (s.log2_masses.back() - s.log2_masses.front()) / (log2_q(scales.back()) - log2_q(scales.front()));
        out.inf_slope = std::min(out.inf_slope, s.scale_slope);
        out.samples.push_back(std::move(s));
    }

    std::vector<std::size_t> idx(out.samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return out.samples[a].scale_slope < out.samples[b].scale_slope; });
    double total = 0;
    for (const auto& s : out.samples) total += s.weight;
    double acc = 0;
    for (auto k : idx) {
        acc += out.samples[k].weight;
        if (acc >= total / 2) {
            out.typical_slope = out.samples[k].scale_slope;
            break;
        }
    }
    return out;
}

}  // namespace dioph
