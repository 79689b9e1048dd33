#pragma once

#include "dioph/params.hpp"
#include "dioph/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dioph {

enum class StageMode { all_H, primes, primes_excluding, nongeometric };

const char* mode_name(StageMode m);
StageMode parse_mode(const std::string& s);

using Range = std::pair<Rational, Rational>;  // closed [first, second]

// Boxes [c - r, c + r]^d with a common radius. Centers are stored flat,
// row-major; tags[i] is the prime whose progression produced center i
// (0 for the plain lattice Z/q^β).
struct IntervalSet {
    int dim = 1;
    Rational radius;
    std::vector<Rational> coords;
    std::vector<std::uint64_t> tags;

    int stage = 0;
    BigInt q;
    StageMode mode = StageMode::all_H;

    std::size_t size() const { return dim ? coords.size() / static_cast<std::size_t>(dim) : 0; }
    bool empty() const { return coords.empty(); }
    const Rational& at(std::size_t i, int j = 0) const { return coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)]; }
    void push(const std::vector<Rational>& c, std::uint64_t tag);

    // Lexicographic sort, exact duplicates collapsed (smallest tag kept).
    void canonicalize();
    bool is_canonical() const;

    // d = 1: union of the boxes as disjoint closed intervals, touching boxes merged.
    std::vector<Range> components() const;
};

// Explicit stage construction. A window overrides the standard (q^γ/2, q^γ];
// nongeometric mode requires one. clip (d = 1) restricts enumeration to the
// given closed ranges. cap bounds the number of generated centers.
IntervalSet build_stage(int i, const ParamSet& ps, const StageSequence& qs, StageMode mode,
                        const PrimeWindow* window = nullptr, const std::vector<Range>* clip = nullptr,
                        std::size_t cap = std::size_t(1) << 22);

struct PruneResult {
    IntervalSet survivors;
    std::size_t removed = 0;
    Rational threshold_exponent;  // threshold is q^{-threshold_exponent}
    double threshold = 0;
    double removal_surrogate = 0;  // q^{s-ε} / (log q^γ)^2
};

PruneResult prune_separated(const IntervalSet& stage, int i, const ParamSet& ps, const StageSequence& qs);

// Children whose centers lie in some closed parent box.
IntervalSet intersect_stages(const IntervalSet& prev, const IntervalSet& next);

// Grid cells of side delta meeting the set in positive measure, after
// clipping every box to [0,1]^d.
BigInt cover_count(const IntervalSet& set, const Rational& delta);

// d = 1, at least two centers.
Rational min_gap(const IntervalSet& set);

struct DimensionEstimate {
    BigInt count;
    BigInt q;
    double estimate = 0;
};

DimensionEstimate box_dimension_estimate(const BigInt& cover, const BigInt& q);
std::vector<DimensionEstimate> box_dimension_estimate(const std::vector<IntervalSet>& sets,
                                                      const StageSequence& qs);

// d = 1 stage described by its progressions only. Counting is floor
// arithmetic, so strict-growth stages far beyond enumeration stay exact.
struct ImplicitStage {
    int stage = 0;
    BigInt q;
    BigInt qbeta;
    Rational radius;
    StageMode mode = StageMode::primes_excluding;
    std::vector<std::uint64_t> primes;
    bool base_lattice = false;       // Z/q^β counted once
    bool exclude_multiples = true;   // numerators m with p | m dropped

    static ImplicitStage build(int i, const ParamSet& ps, const StageSequence& qs, StageMode mode,
                               const PrimeWindow* window = nullptr);

    // Centers in the range; endpoints may be open.
    BigInt count(const Rational& a, const Rational& b, bool a_open = false, bool b_open = false) const;
    // Σ_k w[k]·(centers of progression primes[k]) + w_base·(plain lattice centers).
    long double weighted_count(const Rational& a, const Rational& b, const std::vector<long double>& w,
                               long double w_base, bool a_open = false, bool b_open = false) const;
    // Centers c in the range with q*c an integer.
    BigInt count_aligned(const Rational& a, const Rational& b, bool a_open = false, bool b_open = false) const;
    // Centers of one progression (p = 0: the plain lattice).
    BigInt count_progression(std::uint64_t p, const Rational& a, const Rational& b, bool a_open = false,
                             bool b_open = false) const;

    struct Center {
        Rational c;
        std::uint64_t tag;
    };
    // Sorted centers of the range; throws Overflow above cap.
    std::vector<Center> enumerate(const Rational& a, const Rational& b, bool a_open = false, bool b_open = false,
                                  std::size_t cap = std::size_t(1) << 22) const;

    // k-th smallest center (1-based) in [a, b], or (a, b] when a_open.
    Center kth_center(const Rational& a, const Rational& b, const BigInt& k, bool a_open = false) const;

    // Exact lower bound on the distance between distinct centers.
    Rational separation_lower_bound() const;

    IntervalSet to_interval_set(const std::vector<Range>& within, std::size_t cap = std::size_t(1) << 22) const;
};

// Cells of side 1/q met by child boxes whose centers lie in the parent ranges.
// Requires separation > 4/q so that boxes never share a cell.
BigInt cover_count_within(const ImplicitStage& stage, const std::vector<Range>& parents);

// Exact minimal center gap of a d = 1 progression stage, via 128-bit
// cross-multiplication. Needs every denominator below 2^40.
Rational min_gap_fast(const ImplicitStage& stage);

// Merge closed ranges.
std::vector<Range> merge_ranges(std::vector<Range> rs);

void write_csv(std::ostream& os, const IntervalSet& set);
IntervalSet read_csv(std::istream& is);

}  // namespace dioph
