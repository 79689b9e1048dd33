#include "dioph/restriction.hpp"
#include "dioph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dioph {

namespace {

constexpr long double kTwoPi = 2 * std::numbers::pi_v<long double>;

Rational qmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational qmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace

double RestrictionParams::exponent() const
{
    const double g = gamma.get_d(), b = beta.get_d();
    return -g / q_prime() + (1 - g - b) / p_tilde;
}

double RestrictionParams::threshold() const
{
    const double g = gamma.get_d(), b = beta.get_d();
    return (1 - g - b) / g * q_prime();
}

RestrictionParams restriction_params(const Rational& gamma, const Rational& beta, double p_tilde, double q_exp)
{
    if (gamma <= 0 || beta < 0 || gamma + beta >= 1)
        throw Error(ErrorKind::ConstraintViolation, "restriction", "need γ>0, β>=0, γ+β<1");
    if (!(q_exp > 1) || !(p_tilde >= 1)) throw Error(ErrorKind::ConstraintViolation, "restriction", "need q>1, p̃>=1");
    RestrictionParams rp{gamma, beta, p_tilde, q_exp};
    if (!(p_tilde < rp.threshold()) || !(rp.exponent() > 0))
        throw Error(ErrorKind::ExponentNonpositive, "restriction",
                    "p̃ = " + std::to_string(p_tilde) + " is not below ((1-γ-β)/γ)q' = " + std::to_string(rp.threshold()));
    return rp;
}

RestrictionParams restriction_params_ab(const Rational& a, const Rational& b, double p_tilde, double q_exp)
{
    if (!(a > 0 && a < 1 && b > 0 && b < 1 && b <= 2 * a))
        throw Error(ErrorKind::ConstraintViolation, "restriction", "need 0<a,b<1 and b<=2a");
    const Rational shrink(19, 20);
    const Rational at = a * shrink, bt = b * shrink;
    const Rational gamma = bt / 2, beta = at - bt;
    if (beta < 0) throw Error(ErrorKind::ConstraintViolation, "restriction", "b>a needs the nongeometric window");
    return restriction_params(gamma, beta, p_tilde, q_exp);
}

double KnappIndicator::lq_norm(double q) const { return std::pow(mass.get_d(), 1.0 / q); }

KnappIndicator knapp_indicator(const MeasureTree& t, int i, std::uint64_t p, const PrimeWindow* window)
{
    if (i < 1 || i > static_cast<int>(t.depth())) throw Error(ErrorKind::ConstraintViolation, "restriction", "stage out of range");
    if (window && !window->contains(p))
        throw Error(ErrorKind::PrimeOutsideWindow, "restriction", std::to_string(p) + " is not in the window");
    KnappIndicator f;
    f.stage = i;
    f.prime = p;
    const auto& st = t.stages[static_cast<std::size_t>(i - 1)];
    const auto& deep = t.deepest();
    const auto& w = t.weights.back();
    for (std::size_t k = 0; k < deep.size(); ++k) {
        if (st.tags[t.ancestor(k, i)] != p) continue;
        f.boxes.push_back(k);
        f.mass += w[k];
    }
    if (f.boxes.empty())
        throw Error(ErrorKind::PrimeOutsideWindow, "restriction", "no stage-" + std::to_string(i) + " box carries " + std::to_string(p));
    return f;
}

double DualProgression::point(std::int64_t n) const { return static_cast<double>(n) * spacing.get_d(); }

DualProgression dual_progression(const MeasureTree& t, int i, std::uint64_t p, const BigInt& qbeta, const Rational& eta)
{
    if (t.dim != 1) throw Error(ErrorKind::ConstraintViolation, "restriction", "dual progression needs d=1");
    const auto& st = t.stages.at(static_cast<std::size_t>(i - 1));
    DualProgression d;
    d.stage = i;
    d.prime = p;
    d.spacing = from_u64(p) * qbeta;
    d.eta = eta;
    const Rational budget = Rational(1, 10) - eta;
    if (budget < 0) throw Error(ErrorKind::ConstraintViolation, "restriction", "η above 1/10");
    const Rational reach = st.radius + t.deepest().radius;
    d.n_max = to_i64(floor_q(budget / (reach * Rational(d.spacing))));
    d.full_count = 2 * (st.q / d.spacing) + 1;
    return d;
}

namespace {

struct BoxSpan {
    long double mid, len;
    double w;
};

std::vector<BoxSpan> spans(const KnappIndicator& f, const MeasureTree& t)
{
    const auto& deep = t.deepest();
    const auto& w = t.weights.back();
    std::vector<BoxSpan> out;
    for (auto k : f.boxes) {
        Rational u = qmax(deep.at(k) - deep.radius, Rational(0));
        Rational v = qmin(deep.at(k) + deep.radius, Rational(1));
        Rational mid = (u + v) / 2;
        // Split the midpoint so the long double phase keeps its low bits.
        out.push_back({static_cast<long double>(mid.get_d()) +
                           static_cast<long double>(Rational(mid - Rational(mid.get_d())).get_d()),
                       static_cast<long double>(Rational(v - u).get_d()), w[k].get_d()});
    }
    return out;
}

}  // namespace

std::vector<Complex> extension_values(const KnappIndicator& f, const MeasureTree& t, const std::vector<double>& xi)
{
    const auto sp = spans(f, t);
    std::vector<Complex> out;
    out.reserve(xi.size());
    for (double x : xi) {
        const long double X = x;
        long double re = 0, im = 0;
        for (const auto& b : sp) {
            long double ph = b.mid * X;
            ph -= std::floor(ph);
            const long double a = std::numbers::pi_v<long double> * X * b.len;
            const long double sinc = std::fabs(a) < 1e-12L ? 1.0L : std::sin(a) / a;
            re += b.w * sinc * std::cos(kTwoPi * ph);
            im -= b.w * sinc * std::sin(kTwoPi * ph);
        }
        out.emplace_back(static_cast<double>(re), static_cast<double>(im));
    }
    return out;
}

DistCheck dist_check(const KnappIndicator& f, const MeasureTree& t, const std::vector<Rational>& xi, const Rational& bound)
{
    DistCheck dc;
    const auto& deep = t.deepest();
    for (auto k : f.boxes) {
        const Rational ends[2] = {qmax(deep.at(k) - deep.radius, Rational(0)), qmin(deep.at(k) + deep.radius, Rational(1))};
        for (const auto& x : ends)
            for (const auto& z : xi) {
                Rational v = x * z;
                Rational frac = v - Rational(floor_q(v));
                Rational dist = qmin(frac, 1 - frac);
                if (dc.checked == 0 || dist > dc.worst) dc.worst = dist;
                if (dist > bound) ++dc.failures;
                ++dc.checked;
            }
    }
    return dc;
}

double lp_norm(const std::vector<double>& values, double p, double cell)
{
    if (std::isinf(p)) {
        double m = 0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }
    if (!(p >= 1)) throw Error(ErrorKind::ConstraintViolation, "restriction", "p>=1");
    double s = 0;
    for (double v : values) s += std::pow(std::fabs(v), p) * cell;
    return std::pow(s, 1.0 / p);
}

RatioRow restriction_ratio(const MeasureTree& t, int i, std::uint64_t p, const RestrictionParams& rp, const BigInt& qbeta,
                           std::size_t dist_samples)
{
    RatioRow row;
    row.stage = i;
    row.prime = p;
    row.exponent = rp.exponent();
    if (!(row.exponent > 0)) throw Error(ErrorKind::ExponentNonpositive, "restriction", "exponent is not positive");

    const KnappIndicator f = knapp_indicator(t, i, p);
    const DualProgression dp = dual_progression(t, i, p, qbeta);
    row.mass = f.mass.get_d();
    const double q_i = t.stages[static_cast<std::size_t>(i - 1)].q.get_d();
    const double g = rp.gamma.get_d(), b = rp.beta.get_d();
    row.lower_bound = std::pow(row.mass, 1.0 / rp.q_prime()) * std::pow(q_i, (1 - g - b) / rp.p_tilde) / 10;

    // Each dual cell is sampled at its center and both ends.
    const double eta = dp.eta.get_d();
    std::vector<double> xi;
    for (std::int64_t n = -dp.n_max; n <= dp.n_max; ++n)
        for (double e : {-eta, 0.0, eta}) xi.push_back(dp.point(n) + e);
    const auto vals = extension_values(f, t, xi);
    std::vector<double> cells;
    row.min_ext_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < vals.size(); c += 3) {
        double m = std::min({std::abs(vals[c]), std::abs(vals[c + 1]), std::abs(vals[c + 2])});
        cells.push_back(m);
        row.min_ext_ratio = std::min(row.min_ext_ratio, m / row.mass);
    }
    row.dual_points = cells.size();
    row.computed = lp_norm(cells, rp.p_tilde, 2 * eta) / f.lq_norm(rp.q_exp);

    // Exact distance check on an even sample of dual points, extremes included.
    std::vector<Rational> zs;
    const std::int64_t span = 2 * dp.n_max;
    const std::size_t count = std::min<std::size_t>(dist_samples, static_cast<std::size_t>(span + 1));
    std::vector<std::int64_t> ns;
    for (std::size_t s = 0; s < count; ++s)
        ns.push_back(count == 1 ? 0 : -dp.n_max + static_cast<std::int64_t>(s) * span / static_cast<std::int64_t>(count - 1));
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (auto n : ns)
        for (const Rational& e : {Rational(-dp.eta), Rational(0), dp.eta}) zs.push_back(Rational(from_i64(n) * dp.spacing) + e);
    row.dist = dist_check(f, t, zs);
    return row;
}

PrimeWindow nongeometric_window(const Rational& a, const Rational& b, const Rational& beta, int i, const StageSequence& qs)
{
    if (!(a < b && b <= 2 * a)) throw Error(ErrorKind::ConstraintViolation, "restriction", "need a<b<=2a");
    const Rational lo_e = a - b / 2 - beta;
    if (beta < 0 || lo_e < 0) throw Error(ErrorKind::ConstraintViolation, "restriction", "need 0<=β<=a-b/2");
    const BigInt& q = qs.at(i);
    // For integer p: p > x iff p > floor(x).
    const BigInt lo = floor_power(q, lo_e), hi = floor_power(q, b / 2);
    PrimeWindow w = hi > lo ? primes_in_window(Rational(lo), Rational(hi)) : PrimeWindow{};
    w.kind = WindowKind::nongeometric;
    if (w.empty())
        throw Error(ErrorKind::EmptyWindow, "restriction", "no prime in (q^{a-b/2-β}, q^{b/2}] at stage " + std::to_string(i));
    return w;
}

DimsReport measure_dims_report(const ImplicitTree& t, std::size_t samples, const Rational& b, const Rational& beta)
{
    const auto& primes = t.stage2().primes;
    if (primes.empty()) throw Error(ErrorKind::ConstraintViolation, "restriction", "dims report needs a prime window");
    std::vector<long double> mass(primes.size());
    long double total = 0;
    for (std::size_t k = 0; k < primes.size(); ++k) total += (mass[k] = t.progression_mass(primes[k]));

    std::vector<std::size_t> chosen;
    for (std::size_t k = 0; k < primes.size(); ++k)
        if (mass[k] > 0) {
            chosen.push_back(k);
            break;
        }
    std::vector<double> weights{0.0};
    long double acc = 0;
    std::size_t k = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const long double target = (s + 0.5L) / samples * total;
        while (k + 1 < primes.size() && acc + mass[k] < target) acc += mass[k++];
        chosen.push_back(k);
        weights.push_back(1.0);
    }

    std::vector<std::vector<Rational>> points;
    std::vector<double> used_weights;
    std::vector<std::uint64_t> used_primes;
    std::vector<std::size_t> parents;
    for (std::size_t c = 0; c < chosen.size(); ++c) {
        const std::uint64_t p = primes[chosen[c]];
        for (std::size_t pk = 0; pk < t.parents(); ++pk) {
            Rational x;
            if (!t.first_center(pk, p, x)) continue;
            points.push_back({x});
            used_weights.push_back(weights[c]);
            used_primes.push_back(p);
            parents.push_back(pk);
            break;
        }
    }
    const std::vector<Rational> scales{Rational(1) / Rational(t.stage1().q), Rational(1) / Rational(t.stage2().q)};

    DimsReport rep;
    rep.summary = local_dimension_profile(t, points, scales, used_weights);
    rep.inf_slope = rep.summary.inf_slope;
    rep.typical_slope = rep.summary.typical_slope;
    const double lq = log2_big(t.stage2().q);
    const double e = Rational(b / 2 + beta).get_d();
    rep.c_low = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < points.size(); ++s) {
        if (rep.summary.samples[s].scale_slope == rep.inf_slope) rep.inf_prime = used_primes[s];
        const double c = static_cast<double>(t.child_mass(parents[s], used_primes[s])) *
                         static_cast<double>(used_primes[s]) * std::exp2(e * lq);
        rep.c_low = std::min(rep.c_low, c);
        rep.c_high = std::max(rep.c_high, c);
    }
    return rep;
}

}  // namespace dioph
