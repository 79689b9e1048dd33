#pragma once

#include "dioph/lattice.hpp"
#include "dioph/params.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dioph {

enum class Command { construct, measure, spectrum, dims, project, restrict, report };

const char* command_name(Command c);
Command parse_command(const std::string& s);

struct RunConfig {
    Command command = Command::construct;
    ParamSet params;
    StageMode stage_mode = StageMode::primes_excluding;
    std::optional<BigInt> q1;
    std::vector<BigInt> q_list;  // explicit moduli, overrides q1

    std::string out_dir = "out";
    std::string cache_dir;  // empty: no cache

    std::int64_t k_max = 4096;
    double err_budget = 1e-2;  // cap on the sup-norm error of stored coefficients
    double tolerance = 0.15;  // dimension-fit tolerance

    // nongeometric windows
    Rational a, b;
    bool nongeometric = false;

    // projections
    std::vector<Rational> s;  // s1 >= s2 >= s3
    std::vector<Rational> t;

    // restriction
    double p_tilde = 3;
    double q_exp = 2;

    std::size_t samples = 64;
    bool deterministic = true;  // always on
};

// key = value lines, '#' comments. Unknown keys are a ConstraintViolation.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical key = value dump, sorted by key. Used for manifests and cache keys.
std::string config_text(const RunConfig& c);

}  // namespace dioph
