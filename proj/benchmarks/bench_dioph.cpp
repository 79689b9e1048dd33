#include "dioph/lattice.hpp"
#include "dioph/measure.hpp"
#include "dioph/params.hpp"
#include "dioph/projections.hpp"
#include "dioph/spectrum.hpp"

#include <benchmark/benchmark.h>

using namespace dioph;

namespace {

ParamSet params(Rational g, Rational b, GrowthMode m)
{
    ParamSet p;
    p.gamma = g;
    p.betas = {b};
    p.growth = m;
    p.stages = 2;
    return validate_params(p);
}

void BM_Sieve(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(sieve_primes(static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_Sieve)->Arg(1 << 16)->Arg(1 << 20)->Arg(1 << 24);

void BM_FCoeffs(benchmark::State& state)
{
    const SpectralStage st = SpectralStage::make(1, BigInt(1 << 12), BigInt(8), {11, 13});
    for (auto _ : state) benchmark::DoNotOptimize(F_coeffs(st, state.range(0)));
}
BENCHMARK(BM_FCoeffs)->Arg(1 << 12)->Arg(1 << 16);

void BM_ProductSpectrum(benchmark::State& state)
{
    const SpectralStage a = SpectralStage::make(1, BigInt(16), BigInt(2), {3});
    const SpectralStage b = SpectralStage::make(2, BigInt(256), BigInt(4), {3});
    const std::int64_t K = state.range(0);
    const SparseSpectrum G1 = product_spectrum(unit_spectrum(), F_coeffs(a, K), K, 1.0);
    const SparseSpectrum F2 = F_coeffs(b, K);
    for (auto _ : state) benchmark::DoNotOptimize(product_spectrum(G1, F2, 256, 1.0));
}
BENCHMARK(BM_ProductSpectrum)->Arg(1 << 12)->Arg(1 << 14);

void BM_CoverWithinStrict(benchmark::State& state)
{
    // (1/4, 1/4) strict: q_2 = 2^84, counted without enumeration.
    const ParamSet p = params(Rational(1, 4), Rational(1, 4), GrowthMode::strict);
    const StageSequence qs = make_sequence(p, BigInt(16));
    const IntervalSet s1 = build_stage(1, p, qs, StageMode::primes);
    const ImplicitStage st2 = ImplicitStage::build(2, p, qs, StageMode::primes);
    const auto parents = s1.components();
    for (auto _ : state) benchmark::DoNotOptimize(cover_count_within(st2, parents));
}
BENCHMARK(BM_CoverWithinStrict)->Unit(benchmark::kMillisecond);

void BM_MinGapFast(benchmark::State& state)
{
    ParamSet p = params(Rational(3, 10), Rational(1, 5), GrowthMode::relaxed);
    p.stages = 1;
    const StageSequence qs = sequence_from_list(p, {ipow(BigInt(2), static_cast<unsigned long>(state.range(0)))});
    const ImplicitStage st = ImplicitStage::build(1, p, qs, StageMode::primes_excluding);
    for (auto _ : state) benchmark::DoNotOptimize(min_gap_fast(st));
}
BENCHMARK(BM_MinGapFast)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ImplicitBallMass(benchmark::State& state)
{
    const ParamSet p = params(Rational(0), Rational(1, 2), GrowthMode::strict);
    const StageSequence qs = make_sequence(p, ipow(BigInt(2), 12));
    const IntervalSet s1 = build_stage(1, p, qs, StageMode::all_H);
    const ImplicitTree t = ImplicitTree::uniform(s1, ImplicitStage::build(2, p, qs, StageMode::all_H));
    const Rational x(1, 3), r(1, 1 << 30);
    for (auto _ : state) benchmark::DoNotOptimize(t.ball_mass(x, r));
}
BENCHMARK(BM_ImplicitBallMass);

void BM_SumsetCover(benchmark::State& state)
{
    const auto A = lattice_points(BigInt(1 << 8)), B = lattice_points(BigInt(1 << 8));
    const Rational c(2, 3);
    for (auto _ : state) benchmark::DoNotOptimize(sumset_cover(A, c, B, BigInt(1 << 20)));
}
BENCHMARK(BM_SumsetCover)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
