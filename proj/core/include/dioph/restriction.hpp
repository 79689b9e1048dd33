#pragma once

#include "dioph/measure.hpp"
#include "dioph/params.hpp"
#include "dioph/spectrum.hpp"

#include <cstdint>
#include <vector>

namespace dioph {

struct RestrictionParams {
    Rational gamma, beta;
    double p_tilde = 3;  // target L^p̃
    double q_exp = 2;    // source L^q

    double q_prime() const { return q_exp / (q_exp - 1); }
    // -γ/q' + (1-γ-β)/p̃
    double exponent() const;
    // ((1-γ-β)/γ) q'
    double threshold() const;
};

// Throws ExponentNonpositive when p̃ reaches the threshold.
RestrictionParams restriction_params(const Rational& gamma, const Rational& beta, double p_tilde, double q_exp);
// Interior choice ã = 0.95a, b̃ = 0.95b with 2γ + β = ã and 2γ = b̃.
RestrictionParams restriction_params_ab(const Rational& a, const Rational& b, double p_tilde, double q_exp);

// χ_{E_{i,p}} realized on the deepest boxes of a tree.
struct KnappIndicator {
    int stage = 0;
    std::uint64_t prime = 0;
    std::vector<std::size_t> boxes;  // deepest indices whose stage-i ancestor carries p
    Rational mass;

    // ‖f‖_{L^q(μ)} = μ(E_{i,p})^{1/q}
    double lq_norm(double q) const;
};

// Throws PrimeOutsideWindow when no stage-i box carries p (or p is not in the window).
KnappIndicator knapp_indicator(const MeasureTree& t, int i, std::uint64_t p, const PrimeWindow* window = nullptr);

// N_η(p q^β Z) restricted to the range where every x in E_{i,p} keeps
// dist(xξ, Z) <= 1/10: |n p q^β| (ρ_i + ρ_deepest) + η <= 1/10.
struct DualProgression {
    int stage = 0;
    std::uint64_t prime = 0;
    BigInt spacing;              // p q_i^β
    std::int64_t n_max = 0;      // points n·spacing, |n| <= n_max
    Rational eta;                // half width of each neighborhood
    BigInt full_count;           // points of p q^β Z in [-q_i, q_i]

    std::size_t size() const { return static_cast<std::size_t>(2 * n_max + 1); }
    double point(std::int64_t n) const;
};

DualProgression dual_progression(const MeasureTree& t, int i, std::uint64_t p, const BigInt& qbeta,
                                 const Rational& eta = Rational(1, 100));

// Σ_boxes w e^{-2πicξ} sinc(πξℓ): each box spreads its weight over its part
// [c - ℓ/2, c + ℓ/2] inside [0,1].
std::vector<Complex> extension_values(const KnappIndicator& f, const MeasureTree& t, const std::vector<double>& xi);

// Exact check of dist(xξ, Z) <= bound at both clipped endpoints of every box.
struct DistCheck {
    std::size_t checked = 0;
    std::size_t failures = 0;
    Rational worst;
};
DistCheck dist_check(const KnappIndicator& f, const MeasureTree& t, const std::vector<Rational>& xi,
                     const Rational& bound = Rational(1, 10));

// Riemann-sum L^p norm; p = +inf gives the max.
double lp_norm(const std::vector<double>& values, double p, double cell);

struct RatioRow {
    int stage = 0;
    std::uint64_t prime = 0;
    double mass = 0;
    double lower_bound = 0;  // μ^{1/q'} q^{(1-γ-β)/p̃} / 10
    double computed = 0;     // Riemann sum over the certified dual cells / μ^{1/q}
    double exponent = 0;
    double min_ext_ratio = 0;  // min |ext| / μ(E_{i,p}) over sampled dual points
    std::size_t dual_points = 0;
    DistCheck dist;
};

RatioRow restriction_ratio(const MeasureTree& t, int i, std::uint64_t p, const RestrictionParams& rp,
                           const BigInt& qbeta, std::size_t dist_samples = 64);

// (q_i^{a-b/2-β}, q_i^{b/2}]
PrimeWindow nongeometric_window(const Rational& a, const Rational& b, const Rational& beta, int i,
                                const StageSequence& qs);

struct DimsReport {
    LocalDimSummary summary;
    double inf_slope = 0;
    double typical_slope = 0;
    std::uint64_t inf_prime = 0;
    // child_mass · p · q^{b/2+β} over sampled primes
    double c_low = 0, c_high = 0;
};

// Two-scale slopes between 1/q_1 and 1/q_2 at points of sampled progressions:
// the smallest prime plus primes at equal-mass quantiles.
DimsReport measure_dims_report(const ImplicitTree& t, std::size_t samples, const Rational& b, const Rational& beta);

}  // namespace dioph
