#include "dioph/errors.hpp"
#include "dioph/restriction.hpp"

#include "doctest.h"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

using namespace dioph;

namespace {

struct Fixture {
    ParamSet p;
    StageSequence qs;
    MeasureTree tree;

    Fixture()
    {
        p.gamma = Rational(3, 10);
        p.betas = {Rational(1, 5)};
        p.growth = GrowthMode::relaxed;
        p.stages = 2;
        qs = sequence_from_list(p, {BigInt(1024), ipow(BigInt(2), 30)});
        IntervalSet s1 = build_stage(1, p, qs, StageMode::primes_excluding);
        s1.canonicalize();
        const auto clip = s1.components();
        IntervalSet s2 = build_stage(2, p, qs, StageMode::primes_excluding, nullptr, &clip);
        s2.canonicalize();
        tree = build_weighted_tree({s1, intersect_stages(s1, s2)});
    }
};

Rational Q(long n, long d)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

}  // namespace

TEST_SUITE("restriction")
{
    TEST_CASE("exponent and threshold")
    {
        const RestrictionParams rp = restriction_params(Q(3, 10), Q(1, 5), 3, 2);
        CHECK(rp.q_prime() == 2);
        CHECK(rp.exponent() == doctest::Approx(-0.15 + 0.5 / 3));
        CHECK(rp.threshold() == doctest::Approx(10.0 / 3));
        try {
            restriction_params(Q(3, 10), Q(1, 5), 4, 2);
            FAIL("expected ExponentNonpositive");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ExponentNonpositive);
        }
        const RestrictionParams ab = restriction_params_ab(Q(1, 2), Q(2, 5), 3, 2);
        CHECK(ab.gamma == Q(19, 100));
        CHECK(2 * ab.gamma + ab.beta == Q(19, 40));
    }

    TEST_CASE("Knapp indicator mass is the progression mass")
    {
        Fixture f;
        for (int i = 1; i <= 2; ++i)
            for (std::uint64_t p : {5ul, 7ul, 257ul, 509ul}) {
                const auto& tags = f.tree.stages[static_cast<std::size_t>(i - 1)].tags;
                if (std::find(tags.begin(), tags.end(), p) == tags.end()) {
                    CHECK_THROWS_AS(knapp_indicator(f.tree, i, p), Error);
                    continue;
                }
                CHECK(knapp_indicator(f.tree, i, p).mass == progression_mass(f.tree, i, p));
            }
        const PrimeWindow w = primes_in_window(Rational(4), Rational(6));
        try {
            knapp_indicator(f.tree, 1, 7, &w);
            FAIL("expected PrimeOutsideWindow");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::PrimeOutsideWindow);
        }
    }

    TEST_CASE("dual progression length is the largest admissible n")
    {
        Fixture f;
        const DualProgression d = dual_progression(f.tree, 2, 257, f.qs.power(2, f.p.beta()));
        CHECK(d.spacing == 257 * 64);
        const Rational reach = f.tree.stages[1].radius + f.tree.deepest().radius;
        auto ok = [&](long n) { return Rational(n) * Rational(d.spacing) * reach + d.eta <= Rational(1, 10); };
        CHECK(ok(d.n_max));
        CHECK_FALSE(ok(d.n_max + 1));
        CHECK(d.full_count == 2 * (ipow(BigInt(2), 30) / d.spacing) + 1);
    }

    TEST_CASE("extension values by quadrature over the boxes")
    {
        Fixture f;
        const KnappIndicator k = knapp_indicator(f.tree, 1, 5);
        const auto& deep = f.tree.deepest();
        const auto& w = f.tree.weights.back();
        for (double xi : {0.0, 20.0, 40.5, 300.0}) {
            double re = 0, im = 0;
            for (auto b : k.boxes) {
                const double u = std::max(0.0, Rational(deep.at(b) - deep.radius).get_d());
                const double v = std::min(1.0, Rational(deep.at(b) + deep.radius).get_d());
                const double wt = w[b].get_d() / (v - u);
                using G = boost::math::quadrature::gauss<double, 20>;
                re += wt * G::integrate([&](double x) { return std::cos(2 * std::numbers::pi * xi * x); }, u, v);
                im -= wt * G::integrate([&](double x) { return std::sin(2 * std::numbers::pi * xi * x); }, u, v);
            }
            const auto got = extension_values(k, f.tree, {xi});
            CHECK(got[0].real() == doctest::Approx(re).epsilon(1e-9));
            CHECK(got[0].imag() == doctest::Approx(im).epsilon(1e-9));
        }
    }

    TEST_CASE("distance check is exact")
    {
        Fixture f;
        const KnappIndicator k = knapp_indicator(f.tree, 1, 7);
        const DistCheck dc = dist_check(k, f.tree, {Rational(0), Rational(28), Q(56 * 3, 1)});
        CHECK(dc.checked == 3 * 2 * k.boxes.size());
        // By hand: dist(x·ξ, Z) at each clipped endpoint.
        const auto& deep = f.tree.deepest();
        Rational worst = 0;
        std::size_t bad = 0;
        for (auto b : k.boxes)
            for (const Rational x : {Rational(deep.at(b) - deep.radius), Rational(deep.at(b) + deep.radius)}) {
                const Rational xc = x < 0 ? Rational(0) : (x > 1 ? Rational(1) : x);
                for (const Rational xi : {Rational(0), Rational(28), Rational(168)}) {
                    const Rational v = xc * xi;
                    const Rational fr = v - Rational(floor_q(v));
                    const Rational d = fr < Rational(1, 2) ? fr : Rational(1 - fr);
                    if (d > worst) worst = d;
                    bad += d > Rational(1, 10);
                }
            }
        CHECK(dc.worst == worst);
        CHECK(dc.failures == bad);
    }

    TEST_CASE("lp norms")
    {
        CHECK(lp_norm({1, 2, 2}, 2, 1) == doctest::Approx(3));
        CHECK(lp_norm({3, -4}, INFINITY, 1) == 4);
        CHECK(lp_norm({1, 1, 1, 1}, 3, 0.25) == doctest::Approx(1));
    }

    TEST_CASE("ratio rows stay above the Knapp floor")
    {
        Fixture f;
        const RestrictionParams rp = restriction_params(Q(3, 10), Q(1, 5), 3, 2);
        const RatioRow r = restriction_ratio(f.tree, 2, 257, rp, f.qs.power(2, f.p.beta()));
        CHECK(r.min_ext_ratio >= 0.22);
        CHECK(r.dist.failures == 0);
        CHECK(r.dual_points == 2 * static_cast<std::size_t>(dual_progression(f.tree, 2, 257, f.qs.power(2, f.p.beta())).n_max) + 1);
        CHECK(r.lower_bound > 0);
    }

    TEST_CASE("nongeometric windows")
    {
        ParamSet p;
        p.gamma = Q(2, 5);
        p.betas = {Rational(0)};
        p.growth = GrowthMode::relaxed;
        p.stages = 2;
        const StageSequence qs = sequence_from_list(p, {BigInt(16), ipow(BigInt(2), 50)});
        const PrimeWindow w1 = nongeometric_window(Q(1, 2), Q(4, 5), 0, 1, qs);
        CHECK(w1.primes == std::vector<std::uint64_t>{2, 3});
        const PrimeWindow w2 = nongeometric_window(Q(1, 2), Q(4, 5), 0, 2, qs);
        CHECK(w2.count() == 82014);
        CHECK(w2.primes.front() == 37);
        CHECK(w2.primes.back() == 1048573);
        CHECK_THROWS_AS(nongeometric_window(Q(1, 2), Q(2, 5), 0, 1, qs), Error);
    }
}
