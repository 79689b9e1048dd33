#pragma once

#include "dioph/rational.hpp"

#include <string>
#include <vector>

namespace dioph {

struct ABCParams {
    Rational sA, sB, sC;

    Rational gammaC() const { return (sC + sB - sA) / 2; }
    Rational betaC() const { return sA - sB; }
};

// Requires s in (0,1), s_C > s_A - s_B >= 0 and γ_C + β_C < 1.
ABCParams make_abc(const Rational& sA, const Rational& sB, const Rational& sC);

// Centers of the lattice Z/n in [0,1].
std::vector<Rational> lattice_points(const BigInt& n);

// Distinct cells floor(q·x) hit by x = Σ_j normal[j]·y_j, y_j ranging over factors[j].
BigInt codim1_projection_cover(const std::vector<std::vector<Rational>>& factors, const std::vector<Rational>& normal,
                               const BigInt& q);

// Cells floor(q(a + c b)) over a in A, b in B.
BigInt sumset_cover(const std::vector<Rational>& A, const Rational& c, const std::vector<Rational>& B, const BigInt& q);

// (a + c b)·H·scale ∈ Z for every pair, H the reduced denominator of c.
bool lattice_containment(const std::vector<Rational>& A, const Rational& c, const std::vector<Rational>& B,
                         const BigInt& scale);

struct ProjectionInstance {
    int d = 0;
    std::vector<Rational> s;      // ascending, s[0] = min
    Rational t;
    Rational gamma;               // max{(t - Σ_{j>=2}(s_j - s_1))/d, 0}
    std::vector<Rational> betas;  // s_{j+1} - s_1
    bool below_threshold = false; // t <= Σ_{j>=2}(s_j - s_1)
};

ProjectionInstance make_projection_instance(std::vector<Rational> s, const Rational& t);

// Exponent of the cover bound: Σ_{j>=2} s_j below the threshold, else
// ((d-1)Σ s + t)/d.
Rational codim1_bound_exponent(const ProjectionInstance& inst);

// s1 >= s2 >= s3.
Rational piecewise_f(const Rational& s1, const Rational& s2, const Rational& s3, const Rational& t);

// min{ s1 + Σ_j min{max{(t_j + s_{j+1} - s1)/2, 0}, s_{j+1}}, 1 }.
Rational product_direction_bound(const Rational& s1, const Rational& s2, const Rational& s3, const Rational& t1,
                                 const Rational& t2);

struct RegimeRow {
    Rational t;
    Rational average;  // (Σs + t)/3
    Rational f;
    Rational sum;
    Rational value;    // min of the four with 1
    std::string active;
};

struct RegimeReport {
    bool wide = false;  // s1 + 2 s3 > 1
    std::vector<RegimeRow> rows;
    std::vector<Rational> crossings;  // t where (Σs + t)/3 = f
};

RegimeReport regime_comparator(const Rational& s1, const Rational& s2, const Rational& s3, const std::vector<Rational>& ts);

}  // namespace dioph
