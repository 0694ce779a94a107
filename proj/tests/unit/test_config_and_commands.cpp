#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "trapwave/commands.hpp"
#include "trapwave/errors.hpp"
#include "trapwave/parallel.hpp"
#include "trapwave/run_config.hpp"

using namespace trapwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "trapwave_unit" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("config parsing is strict") {
    const auto parse = [](const char* s) { return run_config_from_json(Json::parse(s)); };
    CHECK_NOTHROW(parse(R"({"scatterer": {"kind": "free"}})"));
    CHECK_THROWS_AS(parse(R"({})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"scatterer": {"kind": "free"}, "extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"scatterer": {"kind": "free"}, "sweep": {"lmax": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"scatterer": {"kind": "free"}, "k_range": {"lo": 5, "hi": 2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse(R"({"scatterer": {"kind": "free"}, "seed": -1})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"scatterer": {"kind": "free"}, "layer": {"points": 7}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse(R"({"scatterer": {"kind": "free"}, "sweep": {"method": "fem"}})"),
                    ConfigError);
    const RunConfig c = parse(R"({"scatterer": {"kind": "dirichlet", "radius": 2},
        "k_range": {"lo": 2, "hi": 3, "step": 0.1}, "certify": {"r_chi_factors": [3]}})");
    CHECK(c.k_range.grid().size() == 11);
    CHECK(c.k_range.grid().back() == doctest::Approx(3.0));
    CHECK(run_config_from_json(run_config_to_json(c)).k_range.hi == 3.0);
}

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit_codes");
    CHECK(run_command("sweep", write_config(dir, "{not json"), dir / "o") == kExitConfig);
    CHECK(run_command("sweep", write_config(dir, R"({"scatterer": {"kind": "ball"}})"), dir / "o") ==
          kExitConfig);
    CHECK(run_command("sweep", dir / "missing.json", dir / "o") == kExitConfig);
    // A two-sample sweep cannot be fitted.
    CHECK(run_command("sweep",
                      write_config(dir, R"({"scatterer": {"kind": "free"},
                          "k_range": {"lo": 2, "hi": 2.5, "step": 0.5}})"),
                      dir / "o") == kExitConfig);
    const fs::path ok = write_config(dir, R"({"scatterer": {"kind": "dirichlet", "radius": 1},
        "k_range": {"lo": 2, "hi": 4, "step": 1}})");
    CHECK(run_command("resonances", ok, dir / "r") == kExitOk);
    CHECK(fs::exists(dir / "r" / "catalog.jsonl"));
    CHECK(fs::exists(dir / "r" / "summary.json"));
    CHECK(run_command("exclusion", ok, dir / "r") == kExitOk);
    CHECK(fs::exists(dir / "r" / "exclusion.json"));
}

TEST_CASE("parallel_for visits each index once and rethrows") {
    ::setenv("TRAPPED_WAVE_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10,
                                 [](std::size_t i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    ::unsetenv("TRAPPED_WAVE_THREADS");
}
