#pragma once

#include "dioph/params.hpp"
#include "dioph/rational.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dioph {

using Complex = std::complex<double>;

// φ = n-fold self-convolution of the normalized box on [-1/n, 1/n].
struct BumpProfile {
    int order = 4;
};

// (sin(2πξ/n) / (2πξ/n))^n
double phi_hat(const BumpProfile& b, double xi);
long double phi_hat_l(const BumpProfile& b, long double xi);
// Spatial density, supported on [-1, 1].
double phi(const BumpProfile& b, double x);
// Σ_{|ξ| > X} over the lattice ξ = j·step, j integer: bound on Σ |φ̂(j step)| for j > J.
double phi_hat_tail(const BumpProfile& b, double step, std::int64_t J);

// One stage of the Salem-type construction. An empty prime list means the
// plain lattice Z/q^β (the γ = 0 case).
struct SpectralStage {
    int stage = 0;
    BigInt q;
    BigInt qbeta;
    std::vector<std::uint64_t> primes;
    BumpProfile profile;

    static SpectralStage make(int stage, const BigInt& q, const BigInt& qbeta, std::vector<std::uint64_t> primes,
                              BumpProfile profile = {});

    bool lattice_only() const { return primes.empty(); }
    double T() const { return t_; }                // Σ 1/(p-1)
    double max_ratio() const { return maxr_; }     // max p/(p-1)
    std::int64_t q64() const;
    std::int64_t qbeta64() const;

    // A(j): F̂(j q^β) = A(j) φ̂(j q^β / q). A(0) = 1.
    double amplitude(std::uint64_t j) const;
    Rational amplitude_exact(std::uint64_t j) const;
    // From Σ_{p | j} p/(p-1).
    double amplitude_from_sum(double s) const;
    Complex coeff(std::int64_t k) const;
    double density(double x) const;

private:
    double t_ = 0;
    double maxr_ = 1;
};

// Φ̂_{i,p}(k) by the three-case formula.
double Phi_coeff(const SpectralStage& st, std::uint64_t p, std::int64_t k);
// Φ̂_{i,p}(0) = 1 - 1/p.
Rational Phi_coeff_zero(std::uint64_t p);
// Spatial Φ_{i,p}(x) = Σ_{v ∉ pZ} p^{-1} q^{1-β} φ(q(x - v/(p q^β))).
double Phi_density(const SpectralStage& st, std::uint64_t p, double x);

struct SparseSpectrum {
    std::vector<std::pair<std::int64_t, Complex>> coeffs;  // sorted by k
    std::int64_t k_max = 0;
    double err_budget = 0;  // sup-norm error of the stored coefficients
    double tail_l1 = 0;     // bound on Σ |coeff| outside |k| <= k_max
    std::vector<int> stages;

    Complex at(std::int64_t k) const;
    double l1() const;
    double max_abs() const;
    std::size_t size() const { return coeffs.size(); }
    bool hermitian(double tol) const;
};

// δ_0: the coefficients of G_0 = χ_[0,1] on integer frequencies.
SparseSpectrum unit_spectrum();

// F̂_i on |k| <= k_max; tail_l1 from the φ̂ decay.
SparseSpectrum F_coeffs(const SpectralStage& st, std::int64_t k_max);

// (Ĝ * F̂)(k) for |k| <= k_out. Throws BudgetExceeded past tolerance.
SparseSpectrum product_spectrum(const SparseSpectrum& G, const SparseSpectrum& F, std::int64_t k_out,
                                double tolerance = 1e-6);

// Π_i F_i(x) from the spatial bump sums.
double evaluate_density(const std::vector<SpectralStage>& stages, double x);

struct MassWindow {
    double value = 0;
    double drift = 0;
    bool pass = false;
};
// Throws MassEscaped unless 1/2 <= Ĝ(0) <= 3/2.
MassWindow mass_window_check(const SparseSpectrum& G);
MassWindow mass_window_check(double g0);

struct ShellRow {
    int j = 0;
    double log2_max = 0;    // achieved (or certified) shell maximum
    double log2_upper = 0;  // certified upper bound
    bool empty = false;
};

// M_j = max{|Ĝ(k)| : 2^j <= |k| < 2^{j+1}} over stored entries.
std::vector<ShellRow> shell_maxima(const SparseSpectrum& G);

struct EnvelopeReport {
    std::vector<ShellRow> shells;
    double fitted_C = 0;        // max_j M_j 2^{jγ} / (j+1)
    double single_stage_C = 0;  // max_k |F̂(k)| / ((log|k| + log q) q^{-γ} (1+|k|/q)^{-(n-1)})
    std::size_t checked = 0;
};
EnvelopeReport decay_envelope(const SparseSpectrum& G, double gamma, const SpectralStage* single = nullptr);

struct FourierFit {
    double slope = 0;
    double estimate = 0;  // -2 slope
    std::size_t shells = 0;
    std::vector<std::pair<int, double>> used;  // (j, log2 value fitted)
};

// Ordinary least squares of log2 M_j on j over nonempty shells.
FourierFit fit_fourier_dimension(const std::vector<ShellRow>& shells, int j_min = 0, int j_max = 1 << 30);
FourierFit fit_fourier_dimension(const SparseSpectrum& G);
// Least squares on the upper concave hull of (j, log2 M_j), evaluated at every j.
FourierFit fit_fourier_dimension_hull(const std::vector<ShellRow>& shells, int j_min = 0, int j_max = 1 << 30);

// Σ_k e^{2πixk} r ψ̂(rk) Ĝ(k).
double fourier_side_ball_mass(const SparseSpectrum& G, double x, double r, const BumpProfile& psi = {});

// F̂(k) = μ̂(q^β k) φ̂(q^{β-1} k) for |k| <= k_max.
SparseSpectrum transfer_rescale(const SparseSpectrum& source, std::int64_t qbeta, std::int64_t q,
                                const BumpProfile& profile, std::int64_t k_max);

// Two-stage shells when F̂_2 lives on multiples of a q^β far wider than Ĝ_1:
// Ĝ_2(l + o) = F̂_2(l) Ĝ_1(o) up to the tail of Ĝ_1 beyond q^β/2.
struct ShellRun {
    std::vector<ShellRow> shells;
    double cross_error = 0;  // bound on the dropped cross terms
    double g0 = 1;           // Ĝ_2(0)
    std::string method;
};
ShellRun separated_shells(const SparseSpectrum& G1, const SpectralStage& st2, int j_max);
// Certified upper bounds |Ĝ_2(k)| <= Σ_o |Ĝ_1(o)| |F̂_2(k-o)| for any q^β.
ShellRun certified_shells(const SparseSpectrum& G1, const SpectralStage& st2, int j_max);

// max over j in [ja, jb] of |A(j)| φ̂(j q^β / q): achieved value and upper bound.
struct AmplitudeMax {
    double achieved = 0;
    double upper = 0;
    std::uint64_t argmax = 0;
};
AmplitudeMax amplitude_max(const SpectralStage& st, std::uint64_t ja, std::uint64_t jb);

void write_spectrum(std::ostream& os, const SparseSpectrum& s);
SparseSpectrum read_spectrum(std::istream& is);

}  // namespace dioph
