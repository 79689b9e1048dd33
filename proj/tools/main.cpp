// dioph: run one pipeline from a key = value config.
//
//   dioph construct --config runs/d1.cfg --out out/d1
//   dioph spectrum --config runs/small.cfg --cache ~/.cache/dioph --kmax 4096

#include "dioph/config.hpp"
#include "dioph/errors.hpp"
#include "dioph/run.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kUsage = 2;

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Diophantine approximation set experiments"};
    app.set_version_flag("--version", dioph::version());

    std::string command, config_path, out, cache, mode, tolerance;
    int stages = 0;
    long long kmax = 0;
    app.add_option("command", command, "construct | measure | spectrum | dims | project | restrict | report");
    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory");
    app.add_option("--cache", cache, "spectrum cache directory (DIOPH_CACHE_DIR overrides)");
    app.add_option("--stages", stages, "number of stages")->check(CLI::PositiveNumber);
    app.add_option("--mode", mode, "growth mode")->check(CLI::IsMember({"strict", "relaxed"}));
    app.add_option("--kmax", kmax, "frequency cutoff")->check(CLI::PositiveNumber);
    app.add_option("--tolerance", tolerance, "dimension-fit tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    dioph::RunConfig cfg;
    try {
        cfg = config_path.empty() ? dioph::parse_config("") : dioph::load_config(config_path);
        // Flags override the file.
        std::string extra;
        if (!command.empty()) extra += "command = " + command + "\n";
        if (!out.empty()) extra += "out = " + out + "\n";
        if (!cache.empty()) extra += "cache = " + cache + "\n";
        if (stages) extra += "stages = " + std::to_string(stages) + "\n";
        if (!mode.empty()) extra += "growth = " + mode + "\n";
        if (kmax) extra += "kmax = " + std::to_string(kmax) + "\n";
        if (!tolerance.empty()) extra += "tolerance = " + tolerance + "\n";
        if (!extra.empty()) {
            std::string text = dioph::config_text(cfg) + extra;
            cfg = dioph::parse_config(text);
        }
    } catch (const dioph::Error& e) {
        std::cerr << "dioph: " << e.module() << ": " << e.detail() << "\n";
        return kUsage;
    }

    const dioph::RunResult r = dioph::run(cfg);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& a : r.assertions)
        std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << " [" << a.topic << "] " << a.detail << "\n";
    if (!r.message.empty()) std::cerr << "dioph: " << r.message << "\n";
    return r.status;
}
