#include "dioph/spectrum.hpp"
#include "dioph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dioph {

namespace {

constexpr double kPi = std::numbers::pi;

// Cardinal B-spline of order n on [0, n].
double cardinal_bspline(int n, double t)
{
    if (t <= 0 || t >= n) return 0;
    double sum = 0, binom = 1, fact = 1;
    for (int k = 1; k < n; ++k) fact *= k;
    for (int k = 0; k <= n; ++k) {
        double u = t - k;
        if (u > 0) sum += ((k & 1) ? -binom : binom) * std::pow(u, n - 1);
        binom = binom * (n - k) / (k + 1);
    }
    return sum / fact;
}

}  // namespace

double phi_hat(const BumpProfile& b, double xi)
{
    double a = 2 * kPi * xi / b.order;
    if (std::fabs(a) < 1e-9) return 1.0;
    return std::pow(std::sin(a) / a, b.order);
}

long double phi_hat_l(const BumpProfile& b, long double xi)
{
    long double a = 2 * std::numbers::pi_v<long double> * xi / b.order;
    if (std::fabs(a) < 1e-12L) return 1.0L;
    return std::pow(std::sin(a) / a, b.order);
}

double phi(const BumpProfile& b, double x)
{
    const int n = b.order;
    return 0.5 * n * cardinal_bspline(n, 0.5 * n * x + 0.5 * n);
}

double phi_hat_tail(const BumpProfile& b, double step, std::int64_t J)
{
    if (J < 1) J = 1;
    const int n = b.order;
    return std::pow(n / (2 * kPi * step), n) * std::pow(static_cast<double>(J), 1 - n) / (n - 1);
}

// ---------------------------------------------------------------------------

SpectralStage SpectralStage::make(int stage, const BigInt& q, const BigInt& qbeta, std::vector<std::uint64_t> primes,
                                  BumpProfile profile)
{
    if (profile.order < 2) throw Error(ErrorKind::ConstraintViolation, "spectrum", "bump order must be >= 2");
    if (q < 1 || qbeta < 1 || qbeta > q) throw Error(ErrorKind::ConstraintViolation, "spectrum", "need 1 <= q^β <= q");
    SpectralStage st;
    st.stage = stage;
    st.q = q;
    st.qbeta = qbeta;
    st.primes = std::move(primes);
    st.profile = profile;
    st.t_ = 0;
    st.maxr_ = 1;
    for (auto p : st.primes) {
        st.t_ += 1.0 / static_cast<double>(p - 1);
        st.maxr_ = std::max(st.maxr_, static_cast<double>(p) / static_cast<double>(p - 1));
    }
    return st;
}

std::int64_t SpectralStage::q64() const
{
    if (!fits_i64(q)) throw Error(ErrorKind::Overflow, "spectrum", "q does not fit 62 bits");
    return to_i64(q);
}

std::int64_t SpectralStage::qbeta64() const
{
    if (!fits_i64(qbeta)) throw Error(ErrorKind::Overflow, "spectrum", "q^β does not fit 62 bits");
    return to_i64(qbeta);
}

double SpectralStage::amplitude_from_sum(double s) const
{
    if (lattice_only()) return 1.0;
    return (s - t_) / static_cast<double>(primes.size());
}

double SpectralStage::amplitude(std::uint64_t j) const
{
    if (lattice_only() || j == 0) return 1.0;
    double s = 0;
    for (auto p : primes)
        if (j % p == 0) s += static_cast<double>(p) / static_cast<double>(p - 1);
    return amplitude_from_sum(s);
}

Rational SpectralStage::amplitude_exact(std::uint64_t j) const
{
    if (lattice_only()) return Rational(1);
    Rational s = 0;
    for (auto p : primes) {
        Rational r(static_cast<unsigned long>(p), static_cast<unsigned long>(p - 1));
        r.canonicalize();
        if (j % p == 0) s += r;
        s -= Rational(1, static_cast<unsigned long>(p - 1));
    }
    s /= static_cast<unsigned long>(primes.size());
    return s;
}

Complex SpectralStage::coeff(std::int64_t k) const
{
    const std::int64_t S = qbeta64();
    if (k % S != 0) return 0;
    const std::uint64_t j = static_cast<std::uint64_t>(k < 0 ? -k : k) / static_cast<std::uint64_t>(S);
    return amplitude(j) * phi_hat(profile, static_cast<double>(k) / static_cast<double>(q64()));
}

namespace {

// Σ_{v ∈ Z, p ∤ v (p = 0: all v)} φ(q(x - v/D)), with D = p q^β.
double bump_sum(const BumpProfile& b, double qd, std::int64_t D, std::uint64_t p, double x)
{
    const double Dd = static_cast<double>(D);
    const auto lo = static_cast<std::int64_t>(std::floor(Dd * (x - 1.0 / qd))) - 1;
    const auto hi = static_cast<std::int64_t>(std::ceil(Dd * (x + 1.0 / qd))) + 1;
    double s = 0;
    for (std::int64_t v = lo; v <= hi; ++v) {
        if (p && v % static_cast<std::int64_t>(p) == 0) continue;
        s += phi(b, qd * (x * Dd - static_cast<double>(v)) / Dd);
    }
    return s;
}

}  // namespace

double SpectralStage::density(double x) const
{
    const double qd = static_cast<double>(q64());
    const std::int64_t S = qbeta64();
    if (lattice_only()) return qd / static_cast<double>(S) * bump_sum(profile, qd, S, 0, x);
    double s = 0;
    for (auto p : primes) s += static_cast<double>(p) / static_cast<double>(p - 1) * Phi_density(*this, p, x);
    return s / static_cast<double>(primes.size());
}

double Phi_coeff(const SpectralStage& st, std::uint64_t p, std::int64_t k)
{
    const std::int64_t S = st.qbeta64();
    if (k % S != 0) return 0;
    const double ph = phi_hat(st.profile, static_cast<double>(k) / static_cast<double>(st.q64()));
    const double pd = static_cast<double>(p);
    if ((k / S) % static_cast<std::int64_t>(p) == 0) return (1 - 1 / pd) * ph;
    return -ph / pd;
}

Rational Phi_coeff_zero(std::uint64_t p)
{
    Rational r(static_cast<unsigned long>(p - 1), static_cast<unsigned long>(p));
    r.canonicalize();
    return r;
}

double Phi_density(const SpectralStage& st, std::uint64_t p, double x)
{
    const double qd = static_cast<double>(st.q64());
    const std::int64_t S = st.qbeta64();
    const std::int64_t D = static_cast<std::int64_t>(p) * S;
    return qd / static_cast<double>(D) * bump_sum(st.profile, qd, D, p, x);
}

// ---------------------------------------------------------------------------

Complex SparseSpectrum::at(std::int64_t k) const
{
    auto it = std::lower_bound(coeffs.begin(), coeffs.end(), k,
                               [](const std::pair<std::int64_t, Complex>& e, std::int64_t v) { return e.first < v; });
    if (it == coeffs.end() || it->first != k) return 0;
    return it->second;
}

double SparseSpectrum::l1() const
{
    double s = 0;
    for (const auto& e : coeffs) s += std::abs(e.second);
    return s;
}

double SparseSpectrum::max_abs() const
{
    double m = 0;
    for (const auto& e : coeffs) m = std::max(m, std::abs(e.second));
    return m;
}

bool SparseSpectrum::hermitian(double tol) const
{
    for (const auto& [k, v] : coeffs)
        if (std::abs(at(-k) - std::conj(v)) > tol) return false;
    return true;
}

SparseSpectrum unit_spectrum()
{
    SparseSpectrum s;
    s.coeffs.emplace_back(0, Complex(1, 0));
    return s;
}

SparseSpectrum F_coeffs(const SpectralStage& st, std::int64_t k_max)
{
    if (k_max < 0) throw Error(ErrorKind::ConstraintViolation, "spectrum", "k_max >= 0");
    const std::int64_t S = st.qbeta64();
    const std::int64_t q = st.q64();
    SparseSpectrum out;
    out.k_max = k_max;
    out.stages = {st.stage};
    const std::int64_t J = k_max / S;
    for (std::int64_t j = -J; j <= J; ++j) {
        const std::int64_t k = j * S;
        const double a = st.amplitude(static_cast<std::uint64_t>(j < 0 ? -j : j));
        const double v = a * phi_hat(st.profile, static_cast<double>(k) / static_cast<double>(q));
        if (v != 0) out.coeffs.emplace_back(k, Complex(v, 0));
    }
    // |A| <= 1, so the φ̂ tail over both signs bounds the dropped mass.
    out.tail_l1 = 2 * phi_hat_tail(st.profile, static_cast<double>(S) / static_cast<double>(q), J);
    return out;
}

namespace {

double l1_beyond(const SparseSpectrum& s, std::int64_t R)
{
    double t = 0;
    for (const auto& [k, v] : s.coeffs)
        if (k > R || k < -R) t += std::abs(v);
    return t;
}

std::int64_t stored_radius(const SparseSpectrum& s)
{
    std::int64_t r = 0;
    for (const auto& e : s.coeffs) r = std::max(r, e.first < 0 ? -e.first : e.first);
    return r;
}

}  // namespace

SparseSpectrum product_spectrum(const SparseSpectrum& G, const SparseSpectrum& F, std::int64_t k_out, double tolerance)
{
    if (k_out < 0) throw Error(ErrorKind::ConstraintViolation, "spectrum", "k_out >= 0");
    SparseSpectrum out;
    out.k_max = k_out;
    out.stages = G.stages;
    out.stages.insert(out.stages.end(), F.stages.begin(), F.stages.end());

    const auto& g = G.coeffs;
    const auto& f = F.coeffs;
    for (std::int64_t k = -k_out; k <= k_out; ++k) {
        Complex acc = 0;
        std::size_t fi = f.size();
        for (const auto& [m, gv] : g) {
            const std::int64_t t = k - m;
            while (fi > 0 && f[fi - 1].first > t) --fi;
            if (fi == 0) break;
            if (f[fi - 1].first == t) acc += gv * f[fi - 1].second;
        }
        if (acc != Complex(0, 0)) out.coeffs.emplace_back(k, acc);
    }

    const double fmax = std::max(F.max_abs(), F.tail_l1);
    const double gl1 = G.l1();
    // Unstored F̂(o), |o| > F.k_max, only meets stored Ĝ(k - o) with |k - o| > F.k_max - k_out.
    double g_far = 0;
    for (const auto& [m, v] : g)
        if (m > F.k_max - k_out || m < k_out - F.k_max) g_far = std::max(g_far, std::abs(v));
    out.err_budget = G.err_budget * (fmax + F.err_budget) + F.err_budget * gl1 + G.tail_l1 * fmax + g_far * F.tail_l1;
    const std::int64_t rg = stored_radius(G);
    out.tail_l1 = gl1 * (l1_beyond(F, std::max<std::int64_t>(0, k_out - rg)) + F.tail_l1) + G.tail_l1 * (F.l1() + F.tail_l1);
    if (out.err_budget > tolerance)
        throw Error(ErrorKind::BudgetExceeded, "spectrum",
                    "error budget " + std::to_string(out.err_budget) + " above tolerance " + std::to_string(tolerance));
    return out;
}

double evaluate_density(const std::vector<SpectralStage>& stages, double x)
{
    double v = 1;
    for (const auto& st : stages) {
        v *= st.density(x);
        if (v == 0) break;
    }
    return v;
}

MassWindow mass_window_check(double g0)
{
    MassWindow m;
    m.value = g0;
    m.drift = std::fabs(g0 - 1);
    m.pass = g0 >= 0.5 && g0 <= 1.5;
    if (!m.pass)
        throw Error(ErrorKind::MassEscaped, "spectrum", "G(0) = " + std::to_string(g0) + " outside [1/2, 3/2]");
    return m;
}

MassWindow mass_window_check(const SparseSpectrum& G) { return mass_window_check(G.at(0).real()); }

// ---------------------------------------------------------------------------

std::vector<ShellRow> shell_maxima(const SparseSpectrum& G)
{
    std::vector<ShellRow> rows;
    if (G.k_max < 1) return rows;
    const int top = static_cast<int>(std::floor(std::log2(static_cast<double>(G.k_max))));
    std::vector<double> best(static_cast<std::size_t>(top + 1), 0.0);
    for (const auto& [k, v] : G.coeffs) {
        const std::int64_t a = k < 0 ? -k : k;
        if (a == 0) continue;
        const int j = 63 - __builtin_clzll(static_cast<unsigned long long>(a));
        if (j <= top) best[static_cast<std::size_t>(j)] = std::max(best[static_cast<std::size_t>(j)], std::abs(v));
    }
    for (int j = 0; j <= top; ++j) {
        ShellRow r;
        r.j = j;
        const double m = best[static_cast<std::size_t>(j)];
        r.empty = m == 0;
        r.log2_max = m > 0 ? std::log2(m) : -std::numeric_limits<double>::infinity();
        r.log2_upper = std::log2(m + G.err_budget + std::numeric_limits<double>::min());
        rows.push_back(r);
    }
    return rows;
}

EnvelopeReport decay_envelope(const SparseSpectrum& G, double gamma, const SpectralStage* single)
{
    EnvelopeReport rep;
    rep.shells = shell_maxima(G);
    for (const auto& r : rep.shells) {
        if (r.empty) continue;
        rep.fitted_C = std::max(rep.fitted_C, std::exp2(r.log2_max + r.j * gamma) / (r.j + 1));
    }
    if (single) {
        const double q = static_cast<double>(single->q64());
        const int N = single->profile.order - 1;
        for (const auto& [k, v] : G.coeffs) {
            if (k == 0 || std::abs(v) == 0) continue;
            const double ak = std::fabs(static_cast<double>(k));
            const double env = (std::log(ak) + std::log(q)) * std::pow(q, -gamma) * std::pow(1 + ak / q, -N);
            rep.single_stage_C = std::max(rep.single_stage_C, std::abs(v) / env);
            ++rep.checked;
        }
    }
    return rep;
}

namespace {

FourierFit ols(const std::vector<std::pair<int, double>>& pts)
{
    if (pts.size() < 4) throw Error(ErrorKind::InsufficientShells, "spectrum", "need at least 4 nonempty shells");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& [j, y] : pts) {
        sx += j;
        sy += y;
        sxx += static_cast<double>(j) * j;
        sxy += j * y;
    }
    FourierFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.estimate = -2 * f.slope;
    f.shells = pts.size();
    f.used = pts;
    return f;
}

std::vector<std::pair<int, double>> usable(const std::vector<ShellRow>& shells, int j_min, int j_max)
{
    std::vector<std::pair<int, double>> pts;
    for (const auto& r : shells)
        if (!r.empty && std::isfinite(r.log2_max) && r.j >= j_min && r.j <= j_max) pts.emplace_back(r.j, r.log2_max);
    return pts;
}

}  // namespace

FourierFit fit_fourier_dimension(const std::vector<ShellRow>& shells, int j_min, int j_max)
{
    return ols(usable(shells, j_min, j_max));
}

FourierFit fit_fourier_dimension(const SparseSpectrum& G) { return fit_fourier_dimension(shell_maxima(G)); }

FourierFit fit_fourier_dimension_hull(const std::vector<ShellRow>& shells, int j_min, int j_max)
{
    auto pts = usable(shells, j_min, j_max);
    if (pts.size() < 4) throw Error(ErrorKind::InsufficientShells, "spectrum", "need at least 4 nonempty shells");
    // Upper hull, monotone chain over increasing j.
    std::vector<std::pair<int, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
            if (cross >= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<std::pair<int, double>> filled;
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const auto& a = hull[h];
        const auto& b = hull[h + 1];
        for (int j = a.first; j < b.first; ++j)
            filled.emplace_back(j, a.second + (b.second - a.second) * (j - a.first) / (b.first - a.first));
    }
    filled.push_back(hull.back());
    return ols(filled);
}

double fourier_side_ball_mass(const SparseSpectrum& G, double x, double r, const BumpProfile& psi)
{
    double s = 0;
    for (const auto& [k, v] : G.coeffs) {
        const double ang = 2 * kPi * x * static_cast<double>(k);
        s += (Complex(std::cos(ang), std::sin(ang)) * v).real() * r * phi_hat(psi, r * static_cast<double>(k));
    }
    return s;
}

SparseSpectrum transfer_rescale(const SparseSpectrum& source, std::int64_t qbeta, std::int64_t q,
                                const BumpProfile& profile, std::int64_t k_max)
{
    if (qbeta < 1 || q < qbeta) throw Error(ErrorKind::ConstraintViolation, "spectrum", "need 1 <= q^β <= q");
    SparseSpectrum out;
    out.k_max = std::min(k_max, source.k_max / qbeta);
    out.stages = source.stages;
    for (std::int64_t k = -out.k_max; k <= out.k_max; ++k) {
        Complex v = source.at(qbeta * k) * phi_hat(profile, static_cast<double>(qbeta * k) / static_cast<double>(q));
        if (v != Complex(0, 0)) out.coeffs.emplace_back(k, v);
    }
    out.err_budget = source.err_budget;
    out.tail_l1 = source.tail_l1 + l1_beyond(source, out.k_max * qbeta);
    return out;
}

// ---------------------------------------------------------------------------

void write_spectrum(std::ostream& os, const SparseSpectrum& s)
{
    os << "# stages=";
    for (std::size_t i = 0; i < s.stages.size(); ++i) os << (i ? "," : "") << s.stages[i];
    os << " k_max=" << s.k_max << std::hexfloat << " err_budget=" << s.err_budget << " tail_l1=" << s.tail_l1 << "\n";
    os << "k,re,im\n";
    for (const auto& [k, v] : s.coeffs) os << k << ',' << v.real() << ',' << v.imag() << "\n";
    os << std::defaultfloat;
}

SparseSpectrum read_spectrum(std::istream& is)
{
    SparseSpectrum s;
    std::string line;
    auto bad = [](const std::string& why) { return Error(ErrorKind::CorruptCache, "spectrum", why); };
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw bad("missing header");
    std::istringstream hs(line.substr(2));
    std::string field;
    while (hs >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw bad("bad header field");
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "stages") {
            std::stringstream vs(val);
            std::string item;
            while (std::getline(vs, item, ','))
                if (!item.empty()) s.stages.push_back(std::stoi(item));
        } else if (key == "k_max") {
            s.k_max = std::stoll(val);
        } else if (key == "err_budget") {
            s.err_budget = std::strtod(val.c_str(), nullptr);
        } else if (key == "tail_l1") {
            s.tail_l1 = std::strtod(val.c_str(), nullptr);
        }
    }
    if (!std::getline(is, line) || line != "k,re,im") throw bad("missing column header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto c1 = line.find(','), c2 = line.rfind(',');
        if (c1 == std::string::npos || c1 == c2) throw bad("bad row");
        const char* row = line.c_str();
        char* end = nullptr;
        const long long k = std::strtoll(row, &end, 10);
        if (end != row + c1) throw bad("bad row");
        const double re = std::strtod(row + c1 + 1, &end);
        if (end != row + c2) throw bad("bad row");
        const double im = std::strtod(row + c2 + 1, &end);
        if (end == row + c2 + 1 || *end != '\0') throw bad("bad row");
        if (!s.coeffs.empty() && k <= s.coeffs.back().first) throw bad("rows out of order");
        s.coeffs.emplace_back(k, Complex(re, im));
    }
    return s;
}

}  // namespace dioph
