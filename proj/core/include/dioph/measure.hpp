#pragma once

#include "dioph/lattice.hpp"
#include "dioph/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace dioph {

// Staged hierarchy of boxes. stages[0] holds the children of the root.
struct MeasureTree {
    int dim = 1;
    std::vector<IntervalSet> stages;
    std::vector<std::vector<std::size_t>> parent;  // parent[i][k] indexes stages[i-1]; 0 for stage 1
    std::vector<std::vector<Rational>> weights;
    std::vector<BigInt> child_count;               // n_i; 0 when the tree is weighted
    bool uniform = true;

    std::size_t depth() const { return stages.size(); }
    const IntervalSet& deepest() const { return stages.back(); }
    // Index of the stage-s (1-based) ancestor of deepest box k.
    std::size_t ancestor(std::size_t k, int s) const;
};

// Uniform child counts n_i = min over parents; lexicographically first
// children kept. Children are attached to the first parent containing them.
MeasureTree build_measure_tree(const std::vector<IntervalSet>& stage_sets);

// Sibling weights proportional to 1/(p-1) for progression p (1 for plain
// lattice centers), the per-progression masses of the F-formula.
MeasureTree build_weighted_tree(const std::vector<IntervalSet>& stage_sets);

// Sum of deepest weights over boxes meeting the closed ball [x-r, x+r]^d.
Rational ball_mass(const MeasureTree& t, const std::vector<Rational>& x, const Rational& r);

// d = 1: mass of [a, b] when each deepest box spreads its weight uniformly
// over its part inside [0,1].
Rational interval_mass(const MeasureTree& t, const Rational& a, const Rational& b);

// μ(E_{i,p}): total weight of stage-i boxes tagged p.
Rational progression_mass(const MeasureTree& t, int i, std::uint64_t p);

bool in_support(const MeasureTree& t, const std::vector<Rational>& x);

void write_tree_csv(std::ostream& os, const MeasureTree& t);

// Anything that can answer ball-mass queries.
class MassModel {
public:
    virtual ~MassModel() = default;
    virtual int dim() const = 0;
    virtual double log2_mass(const std::vector<Rational>& x, const Rational& r) const = 0;
    virtual bool in_support(const std::vector<Rational>& x) const = 0;
};

class TreeModel : public MassModel {
public:
    explicit TreeModel(const MeasureTree& t) : tree_(t) {}
    int dim() const override { return tree_.dim; }
    double log2_mass(const std::vector<Rational>& x, const Rational& r) const override;
    bool in_support(const std::vector<Rational>& x) const override;

private:
    const MeasureTree& tree_;
};

// Two-stage d = 1 measure whose second stage is only counted, never listed.
// Uniform trees pick the n_2 smallest children of every parent; weighted
// trees keep all children with 1/(p-1) progression weights.
class ImplicitTree : public MassModel {
public:
    static ImplicitTree uniform(const IntervalSet& stage1, const ImplicitStage& stage2);
    static ImplicitTree weighted(const IntervalSet& stage1, const ImplicitStage& stage2);

    int dim() const override { return 1; }
    double log2_mass(const std::vector<Rational>& x, const Rational& r) const override;
    bool in_support(const std::vector<Rational>& x) const override;

    bool is_uniform() const { return uniform_; }
    const IntervalSet& stage1() const { return stage1_; }
    const ImplicitStage& stage2() const { return stage2_; }
    std::size_t parents() const { return parents_.size(); }
    const BigInt& n1() const { return n1_; }
    const BigInt& n2() const { return n2_; }
    // Weight of one stage-2 box (uniform trees).
    Rational leaf_weight() const;

    // Exact for uniform trees.
    Rational ball_mass(const Rational& x, const Rational& r) const;
    long double ball_mass_approx(const Rational& x, const Rational& r) const;
    // Mass of a single child of progression p under parent k.
    long double child_mass(std::size_t k, std::uint64_t p) const;
    long double parent_mass(std::size_t k) const;
    Rational progression_mass_exact(std::uint64_t p) const;
    long double progression_mass(std::uint64_t p) const;
    // Smallest child center of progression p under parent k, if any.
    bool first_center(std::size_t k, std::uint64_t p, Rational& out) const;

private:
    struct Parent {
        Rational lo, hi, cut;  // children live in (lo, cut] (or [lo, cut] for the first)
        bool lo_open = false;
        Rational weight;
        long double z = 1;  // weighted: Σ 1/(p-1) over children
    };
    bool uniform_ = true;
    IntervalSet stage1_;
    ImplicitStage stage2_;
    std::vector<Parent> parents_;
    std::vector<long double> rho_;  // 1/(p-1) per stage-2 prime
    BigInt n1_, n2_;

    void attach_parents();
    long double range_weight(const Parent& P, const Rational& a, const Rational& b) const;
};

struct FrostmanSample {
    std::vector<Rational> x;
    Rational r;
    double log2_mass = 0;
    double slope = 0;  // log μ(B(x,r)) / log r
};

struct FrostmanStats {
    std::vector<FrostmanSample> samples;
    double min_slope = 0;
    double max_slope = 0;
    double target = 0;
    double tolerance = 0.15;
    bool pass = false;  // min_slope >= target - tolerance
};

// Radii must lie in (0, 1).
FrostmanStats frostman_fit(const MassModel& m, const std::vector<std::pair<std::vector<Rational>, Rational>>& samples,
                           double target, double tolerance = 0.15);

struct LowerCheck {
    int stage = 0;
    std::uint64_t prime = 0;
    Rational min_interval_mass;
    double c_interval = 0;     // min_interval_mass · q^{s+eps}
    long double progression_mass = 0;
    double c_progression = 0;  // μ(E_{i,p}) · q^{γ+eps}
    double c_floor = 1e-3;
    double eps = 0.1;
    std::size_t intervals = 0;
    bool pass = false;
};

// Every (10q_i)^{-1}-interval centered on a stage-i box of progression p.
LowerCheck frostman_lower_check(const MeasureTree& t, int i, std::uint64_t p, double s, double gamma,
                                double c_floor = 1e-3, double eps = 0.1);
LowerCheck frostman_lower_check(const ImplicitTree& t, std::uint64_t p, double s, double gamma,
                                double c_floor = 1e-3, double eps = 0.1);

struct LocalDimSample {
    std::vector<Rational> x;
    std::vector<Rational> scales;  // decreasing
    std::vector<double> log2_masses;
    std::vector<double> slopes;    // log μ(B(x,r)) / log r
    double scale_slope = 0;        // between the first and last scale
    double weight = 1;
};

struct LocalDimSummary {
    std::vector<LocalDimSample> samples;
    double inf_slope = 0;
    double typical_slope = 0;  // weighted median of scale_slope
};

// Throws PointOutsideSupport. weights may be empty (all 1).
LocalDimSummary local_dimension_profile(const MassModel& m, const std::vector<std::vector<Rational>>& points,
                                        const std::vector<Rational>& scales, const std::vector<double>& weights = {});

}  // namespace dioph
