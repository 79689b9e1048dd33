#include "dioph/cache.hpp"
#include "dioph/config.hpp"
#include "dioph/errors.hpp"
#include "dioph/run.hpp"

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dioph;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("dioph_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmall = "gamma = 3/10\nbeta = 1/5\nstages = 2\ngrowth = relaxed\nq = 1024, 2^30\n";

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("config parsing and canonical text")
    {
        const RunConfig c = parse_config(std::string(kSmall) + "command = restrict  # trailing comment\nkmax = 512\n");
        CHECK(c.command == Command::restrict);
        CHECK(c.params.gamma == Rational(3, 10));
        CHECK(c.q_list.size() == 2);
        CHECK(c.q_list[1] == ipow(BigInt(2), 30));
        CHECK(c.k_max == 512);
        const RunConfig again = parse_config(config_text(c));
        CHECK(config_text(again) == config_text(c));
        CHECK_THROWS_AS(parse_config("gama = 1/4\n"), Error);
        CHECK_THROWS_AS(parse_config("kmax = many\n"), Error);
        CHECK_THROWS_AS(parse_config("command = plot\n"), Error);
    }

    TEST_CASE("sha256 of a known string")
    {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("cache: hit, miss on a new key, corrupt file is a miss")
    {
        const fs::path dir = scratch("cache");
        const SpectrumCache cache(dir.string());
        SparseSpectrum s;
        s.coeffs = {{-1, Complex(0.25, -1e-300)}, {0, Complex(1, 0)}, {1, Complex(0.25, 1e-300)}};
        s.k_max = 1;
        s.tail_l1 = 1.0 / 3;
        s.stages = {1};
        const std::string k1 = SpectrumCache::key("kmax = 256"), k2 = SpectrumCache::key("kmax = 512");
        CHECK(k1 != k2);
        cache.store(k1, s);
        const auto hit = cache.lookup(k1);
        REQUIRE(hit);
        CHECK(hit->coeffs == s.coeffs);
        CHECK(hit->tail_l1 == s.tail_l1);
        CHECK_FALSE(cache.lookup(k2));

        const std::string body = slurp(cache.path(k1));
        {
            std::ofstream out(cache.path(k1), std::ios::binary | std::ios::trunc);
            out << body.substr(0, body.size() - 5);
        }
        std::vector<std::string> warnings;
        CHECK_FALSE(cache.lookup(k1, &warnings));
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("CorruptCache") != std::string::npos);
    }

    TEST_CASE("environment overrides the cache flag")
    {
        ::setenv("DIOPH_CACHE_DIR", "/tmp/from_env", 1);
        CHECK(resolve_cache_dir("/tmp/flag") == "/tmp/from_env");
        ::unsetenv("DIOPH_CACHE_DIR");
        CHECK(resolve_cache_dir("/tmp/flag") == "/tmp/flag");
    }

    TEST_CASE("identical configs give identical bytes")
    {
        for (const char* cmd : {"construct", "restrict", "measure"}) {
            const fs::path a = scratch(std::string("det_a_") + cmd), b = scratch(std::string("det_b_") + cmd);
            RunConfig c = parse_config(std::string(kSmall) + "command = " + cmd + "\n");
            c.out_dir = a.string();
            const RunResult ra = run(c);
            c.out_dir = b.string();
            const RunResult rb = run(c);
            CHECK(ra.message.empty());
            CHECK(ra.files == rb.files);
            for (const auto& f : ra.files) {
                if (f == "manifest.txt") continue;  // echoes the output directory
                CHECK_MESSAGE(slurp(a / f) == slurp(b / f), cmd << "/" << f);
            }
        }
    }

    TEST_CASE("construct asserts separation")
    {
        const fs::path out = scratch("construct");
        RunConfig c = parse_config(std::string(kSmall) + "command = construct\n");
        c.out_dir = out.string();
        const RunResult r = run(c);
        CHECK(r.status == 0);
        REQUIRE(r.assertions.size() == 2);
        for (const auto& a : r.assertions) CHECK(a.topic == "separation");
        const std::string manifest = slurp(out / "manifest.txt");
        CHECK(manifest.rfind(std::string("dioph ") + version(), 0) == 0);
        CHECK(manifest.find("gamma = 3/10") != std::string::npos);
    }

    TEST_CASE("invalid parameters exit nonzero naming the inequality")
    {
        const fs::path out = scratch("invalid");
        RunConfig c = parse_config("gamma = 3/4\nbeta = 1/4\ncommand = construct\n");
        c.out_dir = out.string();
        const RunResult r = run(c);
        CHECK(r.status == 1);
        CHECK(r.message.find("γ+β<1") != std::string::npos);
        CHECK(r.message.find("params") != std::string::npos);
        CHECK(slurp(out / "construct_summary.json").find("γ+β<1") != std::string::npos);
    }

    TEST_CASE("report collects summaries")
    {
        const fs::path out = scratch("report");
        RunConfig c = parse_config(std::string(kSmall) + "command = construct\n");
        c.out_dir = out.string();
        run(c);
        c.command = Command::report;
        const RunResult r = run(c);
        CHECK(r.status == 0);
        CHECK(slurp(out / "report.csv").find("construct,min_gap_stage_1,separation,1") != std::string::npos);
    }
}
