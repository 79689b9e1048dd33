#pragma once

#include "dioph/config.hpp"
#include "dioph/lattice.hpp"
#include "dioph/measure.hpp"
#include "dioph/spectrum.hpp"

#include <string>
#include <vector>

namespace dioph {

const char* version();

// Moduli for a config: the explicit list, else make_sequence from q1.
StageSequence sequence_for(const RunConfig& c);

// Standard window, or the nongeometric one when a and b are set.
PrimeWindow window_for(const RunConfig& c, const StageSequence& qs, int i);

// Explicit stages, each clipped to and intersected with the previous one.
std::vector<IntervalSet> build_stages(const RunConfig& c, const StageSequence& qs);

// Spectral stage i of the construction (lattice-only when γ = 0).
SpectralStage spectral_stage(const RunConfig& c, const StageSequence& qs, int i);

// Box dimension at the last scale and the shell fit of Ĝ_2 for a 2-stage d = 1 run.
struct TwoStageDims {
    BigInt cover;
    DimensionEstimate box;
    SparseSpectrum G1;
    ShellRun shells;
    FourierFit fit;
    double hausdorff_target = 0;  // min{2γ+β, 1}
    double fourier_target = 0;    // 2γ
};
TwoStageDims two_stage_dims(const RunConfig& c, const StageSequence& qs);

struct Assertion {
    std::string name;
    std::string topic;  // neutral label of the property being checked
    bool pass = false;
    std::string detail;
};

struct RunResult {
    int status = 0;  // 0 ok, 1 assertion failure or library error
    std::vector<Assertion> assertions;
    std::vector<std::string> files;     // written, relative to out_dir
    std::vector<std::string> warnings;
    std::string message;                // set when a library error stopped the run
};

// Executes the named pipeline, writing manifest.txt, <command>_summary.json
// and the data files into c.out_dir. Library errors become status 1 with the
// module and violated invariant in message.
RunResult run(const RunConfig& c);

}  // namespace dioph
