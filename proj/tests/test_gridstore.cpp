#include "doctest.h"

#include "cvax/errors.hpp"
#include "cvax/gridstore.hpp"
#include "cvax/valuation.hpp"

#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace cvax;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cvax-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

MarketScenarioSet small_market(std::uint64_t seed = 3, std::size_t n_paths = 32) {
    HullWhiteParams params;
    std::vector<double> cfs{1.0, 2.0, 3.0};
    const TimeGrid grid = build_time_grid(3.0, cfs, DensityRule{{{1e9, 0.5}}});
    return generate_market_scenarios(params, grid, n_paths, seed,
                                     FactorModel::single_market_single_entity(0.0));
}

std::string file_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    return std::string(std::istreambuf_iterator<char>(is),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("fnv1a known values") {
    CHECK(fnv1a(std::string("")) == 14695981039346656037ULL);
    CHECK(fnv1a(std::string("a")) == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a(std::string("foobar")) == 0x85944171f73967e8ULL);
}

TEST_CASE("cube save/load round trip is bit-exact") {
    TempDir tmp;
    const MarketScenarioSet m = small_market();
    const auto swap = make_vanilla_swap("s1", 100.0, 0.02, 0.0, 3.0, 1, 1, true);
    const ValueCube cube = value_cashflow_instrument(swap, m);

    const fs::path f = tmp.path / "s1.cube";
    save_cube(cube, f);
    const ValueCube back = load_cube(f, cube.grid_hash);
    CHECK(back.id == cube.id);
    CHECK(back.values == cube.values);
    CHECK(back.grid.times == cube.grid.times);
    CHECK(back.n_paths == cube.n_paths);
    CHECK(back.scenario_seed == cube.scenario_seed);

    // re-saving produces identical bytes
    const std::string first = file_bytes(f);
    save_cube(cube, f);
    CHECK(file_bytes(f) == first);

    SUBCASE("wrong grid hash is rejected") {
        CHECK_THROWS_AS(load_cube(f, cube.grid_hash + 1), InputError);
    }
    SUBCASE("truncated file is rejected") {
        std::string bytes = file_bytes(f);
        bytes.resize(bytes.size() / 2);
        std::ofstream(tmp.path / "trunc.cube", std::ios::binary) << bytes;
        CHECK_THROWS_AS(load_cube(tmp.path / "trunc.cube"), InputError);
    }
    SUBCASE("bad magic is rejected with a header dump") {
        std::string bytes = file_bytes(f);
        bytes[0] = 'X';
        std::ofstream(tmp.path / "bad.cube", std::ios::binary) << bytes;
        CHECK_THROWS_WITH_AS(load_cube(tmp.path / "bad.cube"),
                             doctest::Contains("magic"), InputError);
    }
}

TEST_CASE("scenario store round trip") {
    TempDir tmp;
    const MarketScenarioSet m = small_market(11, 64);
    const fs::path f = tmp.path / "scen.bin";
    ScenarioStore::save(m, f);
    const MarketScenarioSet back = ScenarioStore::load(f);
    CHECK(back.seed() == m.seed());
    CHECK(back.n_paths() == m.n_paths());
    CHECK(back.grid().times == m.grid().times);
    CHECK(back.short_rates() == m.short_rates());
    CHECK(back.discounts() == m.discounts());
    CHECK(back.systematic_draws() == m.systematic_draws());
    CHECK(scenario_hash(back) == scenario_hash(m));
}

namespace {

DealLibrary three_deals() {
    DealLibrary lib;
    for (int k = 1; k <= 3; ++k) {
        const std::string id = "d" + std::to_string(k);
        lib.linear.emplace(id, make_vanilla_swap(id, 100.0, 0.01 * k, 0.0, 3.0,
                                                 1, 1, k % 2 == 0));
    }
    return lib;
}

ScenarioDescriptor describe(const MarketScenarioSet& m, const fs::path& path,
                            const std::string& id) {
    ScenarioDescriptor d;
    d.id = id;
    d.path = path;
    d.grid_hash = grid_hash(m.grid());
    d.params_hash = params_hash(m.params());
    d.n_paths = m.n_paths();
    return d;
}

} // namespace

TEST_CASE("job planning crosses deals and scenario sets") {
    TempDir tmp;
    const MarketScenarioSet m1 = small_market(1), m2 = small_market(2);
    ScenarioStore::save(m1, tmp.path / "s1.bin");
    ScenarioStore::save(m2, tmp.path / "s2.bin");
    const auto lib = three_deals();
    const JobManifest manifest =
        plan_jobs(lib, {describe(m1, tmp.path / "s1.bin", "s1"),
                        describe(m2, tmp.path / "s2.bin", "s2")},
                  tmp.path / "cubes");
    CHECK(manifest.jobs.size() == 6);

    // manifest JSON round trip
    const JobManifest back = JobManifest::from_json(manifest.to_json());
    CHECK(back.jobs.size() == manifest.jobs.size());
    for (std::size_t i = 0; i < back.jobs.size(); ++i) {
        CHECK(back.jobs[i].deal_id == manifest.jobs[i].deal_id);
        CHECK(back.jobs[i].output == manifest.jobs[i].output);
    }

    // duplicate pair rejection
    JobManifest dup = manifest;
    dup.jobs.push_back(manifest.jobs[0]);
    dup.jobs.back().output += ".other";
    CHECK_THROWS_AS(dup.validate(), InputError);

    CHECK_THROWS_AS(plan_jobs(DealLibrary{}, {describe(m1, "x", "s1")}, "o"),
                    InputError);
    CHECK_THROWS_AS(plan_jobs(lib, {}, "o"), InputError);
}

TEST_CASE("run_job is idempotent and atomic") {
    TempDir tmp;
    const MarketScenarioSet m = small_market(5);
    ScenarioStore::save(m, tmp.path / "s.bin");
    const auto lib = three_deals();
    const JobManifest manifest =
        plan_jobs(lib, {describe(m, tmp.path / "s.bin", "s")}, tmp.path / "cubes");

    run_job(manifest.jobs[0], lib, manifest);
    const std::string once = file_bytes(manifest.jobs[0].output);
    CHECK(fs::exists(manifest.jobs[0].output.string() + ".ok"));
    run_job(manifest.jobs[0], lib, manifest);
    CHECK(file_bytes(manifest.jobs[0].output) == once);

    // unknown deal: .err sidecar, no output file
    Job bad = manifest.jobs[0];
    bad.deal_id = "nope";
    bad.output = tmp.path / "cubes" / "nope.cube";
    CHECK_THROWS_AS(run_job(bad, lib, manifest), InputError);
    CHECK(!fs::exists(bad.output));
    CHECK(fs::exists(bad.output.string() + ".err"));
}

TEST_CASE("parallel and serial runs are byte-identical") {
    TempDir serial_dir, parallel_dir;
    const MarketScenarioSet m1 = small_market(1), m2 = small_market(2);
    const auto lib = three_deals();

    auto run_in = [&](const fs::path& dir, std::size_t workers) {
        ScenarioStore::save(m1, dir / "s1.bin");
        ScenarioStore::save(m2, dir / "s2.bin");
        const JobManifest manifest =
            plan_jobs(lib, {describe(m1, dir / "s1.bin", "s1"),
                            describe(m2, dir / "s2.bin", "s2")},
                      dir / "cubes");
        const RunReport report = run_manifest(manifest, lib, workers);
        CHECK(report.failed == 0);
        CHECK(report.completed == manifest.jobs.size());
        return manifest;
    };
    const JobManifest ms = run_in(serial_dir.path, 1);
    const JobManifest mp = run_in(parallel_dir.path, 4);
    REQUIRE(ms.jobs.size() == mp.jobs.size());
    for (std::size_t i = 0; i < ms.jobs.size(); ++i)
        CHECK(file_bytes(ms.jobs[i].output) == file_bytes(mp.jobs[i].output));
}
