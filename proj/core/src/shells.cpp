// Shell maxima of two-stage spectra too wide to store.

#include "dioph/errors.hpp"
#include "dioph/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dioph {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kSieveSpan = 1ULL << 22;
constexpr std::uint64_t kProbeSpan = 1ULL << 20;

u128 to_u128(const BigInt& z)
{
    if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 126) throw Error(ErrorKind::Overflow, "spectrum", "value beyond 126 bits");
    std::uint64_t w[2] = {0, 0};
    std::size_t cnt = 0;
    mpz_export(w, &cnt, -1, sizeof(std::uint64_t), 0, 0, z.get_mpz_t());
    return (static_cast<u128>(w[1]) << 64) | w[0];
}

struct Ratio {
    long double v;  // q^β / q
};

Ratio step_of(const SpectralStage& st)
{
    // Both are usually powers of the base, so the quotient of the logs is exact.
    return {std::exp2l(static_cast<long double>(log2_big(st.qbeta)) - static_cast<long double>(log2_big(st.q)))};
}

long double hat_at(const SpectralStage& st, Ratio r, std::uint64_t j)
{
    return phi_hat_l(st.profile, static_cast<long double>(j) * r.v);
}

// |A(j)| φ̂ monotone in j while ξ stays below the first zero n/2.
bool monotone(const SpectralStage& st, Ratio r, std::uint64_t jb)
{
    return static_cast<long double>(jb) * r.v < 0.5L * st.profile.order;
}

// Σ_{p | j} p/(p-1) for j in [ja, ja + len).
std::vector<double> divisor_sums(const SpectralStage& st, std::uint64_t ja, std::uint64_t len)
{
    std::vector<double> s(len, 0.0);
    for (auto p : st.primes) {
        const double w = static_cast<double>(p) / static_cast<double>(p - 1);
        std::uint64_t first = (ja + p - 1) / p * p;
        for (std::uint64_t j = first; j - ja < len && j >= ja; j += p) s[j - ja] += w;
    }
    return s;
}

}  // namespace

AmplitudeMax amplitude_max(const SpectralStage& st, std::uint64_t ja, std::uint64_t jb)
{
    if (ja > jb) throw Error(ErrorKind::ConstraintViolation, "spectrum", "empty amplitude range");
    const Ratio r = step_of(st);
    const bool mono = monotone(st, r, jb);
    AmplitudeMax out;
    const double hat_top = mono ? static_cast<double>(hat_at(st, r, ja)) : 1.0;

    if (st.lattice_only()) {
        out.achieved = static_cast<double>(std::fabs(hat_at(st, r, ja)));
        out.argmax = ja;
        out.upper = mono ? out.achieved : 1.0;
        return out;
    }

    auto consider = [&](std::uint64_t j, double sum) {
        double v = std::fabs(st.amplitude_from_sum(sum)) * static_cast<double>(std::fabs(hat_at(st, r, j)));
        if (v > out.achieved) {
            out.achieved = v;
            out.argmax = j;
        }
    };

    if (jb - ja < kSieveSpan) {
        auto s = divisor_sums(st, ja, jb - ja + 1);
        for (std::uint64_t i = 0; i < s.size(); ++i) consider(ja + i, s[i]);
        out.upper = out.achieved;  // exhaustive
        return out;
    }

    // Wide range: probe the start, where φ̂ is largest, then multiples of
    // products of the smallest window primes.
    auto s = divisor_sums(st, ja, kProbeSpan);
    for (std::uint64_t i = 0; i < s.size(); ++i) consider(ja + i, s[i]);

    int r_max = 0;
    u128 prod = 1;
    for (auto p : st.primes) {
        if (prod * p > jb) break;
        prod *= p;
        ++r_max;
        const std::uint64_t P = static_cast<std::uint64_t>(prod);
        const u128 j = (static_cast<u128>(ja) + P - 1) / P * P;
        if (j > jb) continue;
        const auto jj = static_cast<std::uint64_t>(j);
        double sum = 0;
        for (auto p2 : st.primes)
            if (jj % p2 == 0) sum += static_cast<double>(p2) / static_cast<double>(p2 - 1);
        consider(jj, sum);
    }
    const double n = static_cast<double>(st.primes.size());
    const double best_a = std::max(std::fabs(r_max * st.max_ratio() - st.T()), st.T()) / n;
    out.upper = std::max(out.achieved, best_a * hat_top);
    return out;
}

namespace {

// max |Ĝ_1(o)| over stored |o| >= d.
struct SuffixMax {
    std::vector<std::int64_t> at;
    std::vector<double> best;

    explicit SuffixMax(const SparseSpectrum& g)
    {
        std::vector<std::pair<std::int64_t, double>> v;
        for (const auto& [k, c] : g.coeffs) v.emplace_back(k < 0 ? -k : k, std::abs(c));
        std::sort(v.begin(), v.end());
        best.resize(v.size());
        double m = 0;
        for (std::size_t i = v.size(); i-- > 0;) {
            m = std::max(m, v[i].second);
            best[i] = m;
        }
        for (const auto& e : v) at.push_back(e.first);
    }

    double from(u128 d) const
    {
        if (d > static_cast<u128>(std::numeric_limits<std::int64_t>::max())) return 0;
        auto it = std::lower_bound(at.begin(), at.end(), static_cast<std::int64_t>(d));
        return it == at.end() ? 0.0 : best[static_cast<std::size_t>(it - at.begin())];
    }
};

double stored_max_in(const SparseSpectrum& g, u128 lo, u128 hi)
{
    double m = 0;
    for (const auto& [k, c] : g.coeffs) {
        if (k <= 0) continue;
        const auto uk = static_cast<u128>(k);
        if (uk >= lo && uk <= hi) m = std::max(m, std::abs(c));
    }
    return m;
}

double safe_log2(double v) { return v > 0 ? std::log2(v) : -std::numeric_limits<double>::infinity(); }

double F2_abs(const SpectralStage& st, std::uint64_t j)
{
    return std::fabs(st.amplitude(j)) * static_cast<double>(std::fabs(hat_at(st, step_of(st), j)));
}

}  // namespace

ShellRun separated_shells(const SparseSpectrum& G1, const SpectralStage& st2, int j_max)
{
    if (j_max < 0 || j_max > 124) throw Error(ErrorKind::ConstraintViolation, "spectrum", "shell index out of range");
    const u128 S = to_u128(st2.qbeta);
    const u128 half = S / 2;
    std::int64_t rad = 0;
    for (const auto& e : G1.coeffs) rad = std::max(rad, e.first < 0 ? -e.first : e.first);
    if (static_cast<u128>(rad) >= half)
        throw Error(ErrorKind::ConstraintViolation, "spectrum", "stage-1 spectrum is not separated by q^β");

    ShellRun run;
    run.method = "separated";
    run.g0 = G1.at(0).real();
    run.cross_error = G1.tail_l1 + G1.err_budget;
    const SuffixMax suf(G1);
    const double g_top = std::abs(G1.at(0));
    const double g_top_up = std::max(g_top, G1.max_abs()) + G1.err_budget;
    const u128 kmax = static_cast<u128>(std::max<std::int64_t>(G1.k_max, rad));

    for (int t = 0; t <= j_max; ++t) {
        const u128 a = static_cast<u128>(1) << t, b = static_cast<u128>(1) << (t + 1);
        double ach = 0, up = 0;

        // l = 0: the stored stage-1 spectrum itself.
        if (a <= half) {
            const u128 hi = std::min(b - 1, half);
            double m = stored_max_in(G1, a, hi);
            ach = std::max(ach, m);
            up = std::max(up, m + (hi > kmax ? G1.tail_l1 : 0.0) + G1.err_budget);
        }

        const u128 ja128 = (a + S - 1) / S, jb128 = (b + S - 1) / S - 1;
        if (jb128 > std::numeric_limits<std::uint64_t>::max())
            throw Error(ErrorKind::Overflow, "spectrum", "stage-2 index beyond 64 bits");
        const auto ja = static_cast<std::uint64_t>(std::max<u128>(ja128, 1));
        const auto jb = static_cast<std::uint64_t>(jb128);
        if (ja <= jb) {
            AmplitudeMax am = amplitude_max(st2, ja, jb);
            ach = std::max(ach, am.achieved * g_top);
            up = std::max(up, am.upper * g_top_up);
        }
        // Edge progressions whose offsets only partly reach into the shell.
        const std::uint64_t je = ja - 1;
        if (je >= 1) {
            const u128 d = a - static_cast<u128>(je) * S;
            if (d <= half) {
                const double f = F2_abs(st2, je);
                const double m = suf.from(d);
                ach = std::max(ach, f * m);
                up = std::max(up, f * (m + G1.tail_l1 + G1.err_budget));
            }
        }
        const std::uint64_t ju = jb + 1;
        {
            const u128 lu = static_cast<u128>(ju) * S;
            const u128 d = lu - b + 1;
            if (lu >= b && d <= half) {
                const double f = F2_abs(st2, ju);
                const double m = suf.from(d);
                ach = std::max(ach, f * m);
                up = std::max(up, f * (m + G1.tail_l1 + G1.err_budget));
            }
        }

        ShellRow row;
        row.j = t;
        row.empty = ach == 0;
        row.log2_max = safe_log2(ach);
        row.log2_upper = safe_log2(up + run.cross_error);
        run.shells.push_back(row);
    }
    return run;
}

ShellRun certified_shells(const SparseSpectrum& G1, const SpectralStage& st2, int j_max)
{
    if (j_max < 0 || j_max > 124) throw Error(ErrorKind::ConstraintViolation, "spectrum", "shell index out of range");
    const u128 S = to_u128(st2.qbeta);
    std::int64_t rad = 0;
    for (const auto& e : G1.coeffs) rad = std::max(rad, e.first < 0 ? -e.first : e.first);
    const u128 K = static_cast<u128>(rad);
    const double l1 = G1.l1() + G1.err_budget * static_cast<double>(G1.size());

    ShellRun run;
    run.method = "certified";
    run.g0 = G1.at(0).real();
    run.cross_error = G1.tail_l1;
    for (int t = 0; t <= j_max; ++t) {
        const u128 a = static_cast<u128>(1) << t, b = static_cast<u128>(1) << (t + 1);
        const u128 lo = a > K ? a - K : 0;
        const u128 hi = b - 1 + K;
        const u128 ja128 = (lo + S - 1) / S, jb128 = hi / S;
        double fmax = 0;
        if (ja128 == 0) {
            fmax = 1.0;
        } else if (ja128 <= jb128) {
            if (jb128 > std::numeric_limits<std::uint64_t>::max())
                throw Error(ErrorKind::Overflow, "spectrum", "stage-2 index beyond 64 bits");
            fmax = amplitude_max(st2, static_cast<std::uint64_t>(ja128), static_cast<std::uint64_t>(jb128)).upper;
        }
        const double bound = l1 * fmax + G1.tail_l1;
        ShellRow row;
        row.j = t;
        row.empty = bound == 0;
        row.log2_max = safe_log2(bound);
        row.log2_upper = row.log2_max;
        run.shells.push_back(row);
    }
    return run;
}

}  // namespace dioph
