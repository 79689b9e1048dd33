#include "dioph/errors.hpp"
#include "dioph/spectrum.hpp"

#include "doctest.h"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace dioph;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite 30-point Gauss-Legendre on n equal pieces of [a, b].
double quad(const std::function<double(double)>& f, double a, double b, long n)
{
    double s = 0;
    const double h = (b - a) / static_cast<double>(n);
    for (long i = 0; i < n; ++i)
        s += boost::math::quadrature::gauss<double, 30>::integrate(f, a + h * static_cast<double>(i),
                                                                      a + h * static_cast<double>(i + 1));
    return s;
}

// ∫_0^1 g(x) e^{-2πikx} dx on a grid fine enough for both g's knots and the oscillation.
Complex fourier_quad(const std::function<double(double)>& g, std::int64_t k, long knots)
{
    const long n = knots * (1 + static_cast<long>(std::llabs(k)) / knots + 1);
    const double re = quad([&](double x) { return g(x) * std::cos(2 * kPi * static_cast<double>(k) * x); }, 0, 1, n);
    const double im = quad([&](double x) { return -g(x) * std::sin(2 * kPi * static_cast<double>(k) * x); }, 0, 1, n);
    return {re, im};
}

SpectralStage stage(int i, long q, long qbeta, std::vector<std::uint64_t> primes)
{
    return SpectralStage::make(i, BigInt(q), BigInt(qbeta), std::move(primes));
}

}  // namespace

TEST_SUITE("spectrum")
{
    TEST_CASE("bump profile: unit mass, support, transform")
    {
        const BumpProfile b;
        CHECK(quad([&](double x) { return phi(b, x); }, -1, 1, 8) == doctest::Approx(1).epsilon(1e-14));
        CHECK(phi(b, 1.0) == 0);
        CHECK(phi(b, -1.5) == 0);
        for (double xi : {0.0, 0.3, 1.7, 5.25}) {
            const double want = quad([&](double x) { return phi(b, x) * std::cos(2 * kPi * xi * x); }, -1, 1, 64);
            CHECK(phi_hat(b, xi) == doctest::Approx(want).epsilon(1e-12));
        }
    }

    TEST_CASE("phi_hat tail bounds the dropped sum")
    {
        const BumpProfile b;
        const double step = 1.0 / 32;
        for (std::int64_t J : {10, 100, 1000}) {
            double s = 0;
            for (std::int64_t j = J + 1; j < 2000000; ++j) s += std::fabs(phi_hat(b, step * static_cast<double>(j)));
            CHECK(s <= phi_hat_tail(b, step, J));
        }
    }

    TEST_CASE("Phi coefficients by quadrature of the spatial sum")
    {
        const SpectralStage st = stage(1, 64, 8, {3, 5, 7});
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 30; ++trial) {
            const std::uint64_t p = st.primes[rng() % 3];
            const std::int64_t k = static_cast<std::int64_t>(rng() % 400) - 200;
            const Complex want = fourier_quad([&](double x) { return Phi_density(st, p, x); }, k,
                                              2 * 64 * static_cast<long>(p));
            CHECK(std::abs(want - Complex(Phi_coeff(st, p, k), 0)) <= 1e-9);
        }
        CHECK(Phi_coeff_zero(7) == Rational(6, 7));
        CHECK(Phi_coeff(st, 7, 0) == doctest::Approx(6.0 / 7));
    }

    TEST_CASE("amplitude: exact rationals and the F-formula")
    {
        const SpectralStage st = stage(1, 64, 8, {3, 5, 7});
        CHECK(st.amplitude_exact(0) == 1);
        for (std::uint64_t j = 0; j < 300; ++j) {
            // (1/#P)(#{p | j} - Σ_{p ∤ j} 1/(p-1))
            Rational want = 0;
            for (auto p : st.primes) {
                if (j % p == 0)
                    want += 1;
                else
                    want -= Rational(1, static_cast<unsigned long>(p - 1));
            }
            want /= 3;
            CHECK(st.amplitude_exact(j) == want);
            CHECK(st.amplitude(j) == doctest::Approx(want.get_d()).epsilon(1e-15));
        }
    }

    TEST_CASE("F coefficients by quadrature")
    {
        const SpectralStage st = stage(1, 64, 8, {3, 5, 7});
        const SparseSpectrum F = F_coeffs(st, 512);
        CHECK(F.at(0) == Complex(1, 0));
        for (std::int64_t k : {0, 8, 16, 24, 120, 200, -64, 13}) {
            const Complex want = fourier_quad([&](double x) { return st.density(x); }, k, 2 * 64 * 105);
            CHECK(std::abs(want - F.at(k)) <= 1e-9);
            CHECK(std::abs(want - st.coeff(k)) <= 1e-9);
        }
        // Lattice-only stage: Z/q^β with unit mass.
        const SpectralStage lat = stage(1, 64, 8, {});
        CHECK(lat.lattice_only());
        const Complex w = fourier_quad([&](double x) { return lat.density(x); }, 40, 2 * 64);
        CHECK(std::abs(w - lat.coeff(40)) <= 1e-9);
    }

    TEST_CASE("product spectrum against quadrature of the product density")
    {
        const SpectralStage a = stage(1, 16, 2, {3});
        const SpectralStage b = stage(2, 256, 4, {3});
        const SparseSpectrum G1 = product_spectrum(unit_spectrum(), F_coeffs(a, 1 << 14), 1 << 14, 1e-9);
        const SparseSpectrum G2 = product_spectrum(G1, F_coeffs(b, 1 << 14), 64, 1e-6);
        CHECK(G1.at(0).real() == doctest::Approx(1));
        for (std::int64_t k : {0, 1, 2, 6, 12, 30, 64, -18}) {
            const Complex want = fourier_quad([&](double x) { return evaluate_density({a, b}, x); }, k, 2 * 256 * 3);
            CHECK(std::abs(want - G2.at(k)) <= 1e-9);
        }
        CHECK(G2.hermitian(1e-12));
    }

    TEST_CASE("budget overrun throws")
    {
        const SpectralStage a = stage(1, 16, 2, {3});
        const SpectralStage b = stage(2, 256, 4, {3});
        const SparseSpectrum G1 = product_spectrum(unit_spectrum(), F_coeffs(a, 1 << 10), 1 << 10, 1.0);
        // unit × F is exact, so the budget only bites once Ĝ has far coefficients.
        CHECK_NOTHROW(product_spectrum(unit_spectrum(), F_coeffs(b, 64), 64, 1e-9));
        CHECK_THROWS_AS(product_spectrum(G1, F_coeffs(b, 64), 64, 1e-9), Error);
    }

    TEST_CASE("mass window")
    {
        CHECK(mass_window_check(1.2).pass);
        try {
            mass_window_check(0.2);
            FAIL("expected MassEscaped");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MassEscaped);
        }
    }

    TEST_CASE("shell maxima and OLS on a synthetic envelope")
    {
        SparseSpectrum G;
        for (std::int64_t k = -4096; k <= 4096; ++k) {
            const double mag = k == 0 ? 1 : std::pow(static_cast<double>(std::llabs(k)), -0.3);
            G.coeffs.emplace_back(k, Complex(mag, 0));
        }
        G.k_max = 4096;
        const auto rows = shell_maxima(G);
        REQUIRE(rows.size() >= 12);
        CHECK(rows[3].log2_max == doctest::Approx(-0.3 * 3));
        const FourierFit f = fit_fourier_dimension(rows);
        CHECK(f.slope == doctest::Approx(-0.3).epsilon(1e-9));
        CHECK(f.estimate == doctest::Approx(0.6).epsilon(1e-9));
        const FourierFit h = fit_fourier_dimension_hull(rows);
        CHECK(h.slope == doctest::Approx(-0.3).epsilon(1e-9));
        CHECK_THROWS_AS(fit_fourier_dimension(std::vector<ShellRow>(rows.begin(), rows.begin() + 3)), Error);
    }

    TEST_CASE("amplitude max: sieve equals a direct scan")
    {
        const SpectralStage st = stage(2, 1 << 20, 32, {17, 19, 23, 29, 31});
        const AmplitudeMax am = amplitude_max(st, 100, 5000);
        double best = 0;
        for (std::uint64_t j = 100; j <= 5000; ++j)
            best = std::max(best, std::fabs(st.amplitude(j) * phi_hat(st.profile, static_cast<double>(j) * 32 / (1 << 20))));
        CHECK(am.achieved == doctest::Approx(best).epsilon(1e-14));
        CHECK(am.upper >= am.achieved);
    }

    TEST_CASE("separated and certified shells bracket the true maxima")
    {
        const SpectralStage a = stage(1, 16, 2, {3});
        const SpectralStage b = stage(2, 1 << 16, 16, {5, 7});
        // A truncated, tail-free Ĝ_1 makes the product exact on |k| < 2^12.
        SparseSpectrum G1 = product_spectrum(unit_spectrum(), F_coeffs(a, 7), 7, 1e9);
        G1.tail_l1 = 0;
        G1.err_budget = 0;
        const SparseSpectrum G2 = product_spectrum(G1, F_coeffs(b, (1 << 12) + 8), (1 << 12) - 1, 1e-12);
        const auto brute = shell_maxima(G2);
        const ShellRun sep = separated_shells(G1, b, 11);
        const ShellRun cer = certified_shells(G1, b, 11);
        for (int j = 0; j <= 11; ++j) {
            const double t = brute[static_cast<std::size_t>(j)].log2_max;
            const double got = sep.shells[static_cast<std::size_t>(j)].log2_max;
            if (std::isinf(t))
                CHECK(got == t);
            else
                CHECK(got == doctest::Approx(t).epsilon(1e-9));
            CHECK(sep.shells[static_cast<std::size_t>(j)].log2_upper >= t - 1e-9);
            CHECK(cer.shells[static_cast<std::size_t>(j)].log2_upper >= t - 1e-9);
        }
        CHECK(sep.g0 == doctest::Approx(G2.at(0).real()));
    }

    TEST_CASE("Fourier-side ball mass equals the spatial smoothing")
    {
        const SpectralStage a = stage(1, 64, 8, {3, 5});
        const SparseSpectrum G = F_coeffs(a, 1 << 14);
        for (double x : {0.1, 0.37, 0.5}) {
            const double r = 0.05;
            const double want = quad([&](double y) { return phi({}, (x - y) / r) * a.density(y); }, x - r, x + r, 256);
            CHECK(fourier_side_ball_mass(G, x, r) == doctest::Approx(want).epsilon(1e-9));
        }
    }

    TEST_CASE("transfer rescale is the transform of the periodized dilation")
    {
        // ν = F_a * qφ(q·); F(x) = (1/S) Σ_n ν((x + n)/S) has F̂(k) = ν̂(Sk).
        const SpectralStage a = stage(1, 16, 2, {3});
        const SparseSpectrum src = F_coeffs(a, 1 << 12);
        const std::int64_t S = 4, q = 64;
        const SparseSpectrum out = transfer_rescale(src, S, q, {}, 32);
        const auto nu = [&](double y) {
            return quad([&](double z) { return a.density(y - z) * static_cast<double>(q) * phi({}, static_cast<double>(q) * z); },
                        -1.0 / q, 1.0 / q, 8);
        };
        for (std::int64_t k : {0, 1, 3, 8}) {
            const double want = quad([&](double y) { return nu(y) * std::cos(2 * kPi * static_cast<double>(S * k) * y); }, 0, 1, 192);
            CHECK(std::abs(out.at(k) - Complex(want, 0)) <= 1e-9);
        }
    }

    TEST_CASE("spectrum files round trip bit for bit")
    {
        const SpectralStage a = stage(1, 64, 8, {3, 5, 7});
        const SparseSpectrum F = F_coeffs(a, 300);
        std::stringstream ss;
        write_spectrum(ss, F);
        const SparseSpectrum R = read_spectrum(ss);
        REQUIRE(R.coeffs.size() == F.coeffs.size());
        for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
            CHECK(R.coeffs[i].first == F.coeffs[i].first);
            CHECK(R.coeffs[i].second == F.coeffs[i].second);
        }
        CHECK(R.tail_l1 == F.tail_l1);
        CHECK(R.k_max == F.k_max);
        std::stringstream bad("# stages=1 k_max=3\nk,re,im\n1,zz,0\n");
        CHECK_THROWS_AS(read_spectrum(bad), Error);
    }
}
