#include "cvax/gridstore.hpp"
#include "cvax/errors.hpp"
#include "cvax/valuation.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace cvax {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t basis) {
    constexpr std::uint64_t kPrime = 1099511628211ULL;
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = basis;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kPrime;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t basis) {
    return fnv1a(s.data(), s.size(), basis);
}

std::uint64_t grid_hash(const TimeGrid& grid) {
    std::uint64_t h = fnv1a(grid.times.data(),
                            grid.times.size() * sizeof(double));
    for (PointTag tag : grid.tags) {
        const auto t = static_cast<unsigned char>(tag);
        h = fnv1a(&t, 1, h);
    }
    return h;
}

std::uint64_t params_hash(const HullWhiteParams& params) {
    std::uint64_t h = fnv1a(&params.mean_reversion, sizeof(double));
    h = fnv1a(&params.volatility, sizeof(double), h);
    h = fnv1a(params.curve.tenors().data(),
              params.curve.tenors().size() * sizeof(double), h);
    h = fnv1a(params.curve.zeros().data(),
              params.curve.zeros().size() * sizeof(double), h);
    return h;
}

std::uint64_t scenario_hash(const MarketScenarioSet& market) {
    std::uint64_t h = grid_hash(market.grid());
    const std::uint64_t ph = params_hash(market.params());
    h = fnv1a(&ph, sizeof(ph), h);
    const std::uint64_t seed = market.seed();
    h = fnv1a(&seed, sizeof(seed), h);
    const std::uint64_t np = market.n_paths();
    h = fnv1a(&np, sizeof(np), h);
    return h;
}

namespace {

// Raw little-endian binary I/O; the formats below assume an LE host,
// which is all this build targets.
static_assert(std::endian::native == std::endian::little,
              "value-store format is little-endian");

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw InputError("value-store file truncated");
}

void put_string(std::ostream& os, const std::string& s) {
    put(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
    std::uint32_t n = 0;
    get(is, n);
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (!is) throw InputError("value-store file truncated");
    return s;
}

template <typename T>
void put_vector(std::ostream& os, const std::vector<T>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void get_vector(std::istream& is, std::vector<T>& v, std::size_t n) {
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(T)));
    if (!is) throw InputError("value-store file truncated");
}

void put_grid(std::ostream& os, const TimeGrid& grid) {
    put(os, static_cast<std::uint64_t>(grid.size()));
    put_vector(os, grid.times);
    std::vector<std::uint8_t> tags(grid.tags.size());
    for (std::size_t i = 0; i < tags.size(); ++i)
        tags[i] = static_cast<std::uint8_t>(grid.tags[i]);
    put_vector(os, tags);
}

TimeGrid get_grid(std::istream& is) {
    std::uint64_t n = 0;
    get(is, n);
    TimeGrid grid;
    get_vector(is, grid.times, n);
    std::vector<std::uint8_t> tags;
    get_vector(is, tags, n);
    grid.tags.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        grid.tags[i] = static_cast<PointTag>(tags[i]);
    return grid;
}

// Write via a uniquely named temp file, then rename: readers never see a
// partial file and killed runs leave nothing at the final path.
void atomic_write(const std::filesystem::path& path,
                  const std::string& bytes) {
    static std::atomic<std::uint64_t> counter{0};
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." +
           std::to_string(counter.fetch_add(1));
    {
        std::ofstream os(tmp, std::ios::binary);
        require(os.good(), "cannot write " + tmp.string());
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        require(os.good(), "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

std::string ValueStoreHeader::dump() const {
    std::ostringstream os;
    os << "magic=0x" << std::hex << magic << std::dec << " version=" << version
       << " layout=" << layout << " grid_length=" << grid_length
       << " n_paths=" << n_paths << " grid_hash=0x" << std::hex << grid_hash
       << " seed=0x" << seed << std::dec << " has_exercise=" << has_exercise
       << " deal_id=" << deal_id;
    return os.str();
}

void save_cube(const ValueCube& cube, const std::filesystem::path& path) {
    require(cube.n_paths > 0 && cube.grid.size() > 0,
            "refusing to save an empty value cube");
    std::ostringstream os(std::ios::binary);
    put(os, ValueStoreHeader::kMagic);
    put(os, ValueStoreHeader::kVersion);
    put(os, std::uint32_t{0}); // layout: time-major f64
    put(os, static_cast<std::uint64_t>(cube.grid.size()));
    put(os, static_cast<std::uint64_t>(cube.n_paths));
    put(os, cube.grid_hash);
    put(os, cube.scenario_seed);
    put(os, static_cast<std::uint32_t>(cube.has_exercise() ? 1 : 0));
    put_string(os, cube.id);
    put_grid(os, cube.grid);
    put_vector(os, cube.values);
    if (cube.has_exercise()) put_vector(os, cube.exercised);
    atomic_write(path, os.str());
}

ValueCube load_cube(const std::filesystem::path& path,
                    std::optional<std::uint64_t> expected_grid_hash) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), "cannot open value store " + path.string());

    ValueStoreHeader h;
    get(is, h.magic);
    get(is, h.version);
    get(is, h.layout);
    get(is, h.grid_length);
    get(is, h.n_paths);
    get(is, h.grid_hash);
    get(is, h.seed);
    get(is, h.has_exercise);
    if (h.magic != ValueStoreHeader::kMagic ||
        h.version != ValueStoreHeader::kVersion || h.layout != 0)
        throw InputError("not a supported value store: " + h.dump());
    h.deal_id = get_string(is);

    ValueCube cube;
    cube.id = h.deal_id;
    cube.grid = get_grid(is);
    require(cube.grid.size() == h.grid_length,
            "grid length mismatch in " + path.string());
    cube.n_paths = h.n_paths;
    cube.scenario_seed = h.seed;
    cube.grid_hash = h.grid_hash;
    require(grid_hash(cube.grid) == h.grid_hash,
            "stored grid does not match its hash: " + h.dump());
    if (expected_grid_hash && h.grid_hash != *expected_grid_hash)
        throw InputError("value store built on a different grid: " + h.dump());
    get_vector(is, cube.values, h.grid_length * h.n_paths);
    if (h.has_exercise)
        get_vector(is, cube.exercised, h.grid_length * h.n_paths);
    // Any trailing bytes mean the file is not what the header claims.
    is.peek();
    require(is.eof(), "trailing bytes in value store " + path.string());
    return cube;
}

void ScenarioStore::save(const MarketScenarioSet& market,
                         const std::filesystem::path& path) {
    constexpr std::uint64_t kMagic = 0x4e45435358415643ULL; // "CVAXSCEN"
    std::ostringstream os(std::ios::binary);
    put(os, kMagic);
    put(os, std::uint32_t{1});
    put(os, static_cast<std::uint64_t>(market.n_paths()));
    put(os, static_cast<std::uint64_t>(market.n_systematic()));
    put(os, market.seed());
    put(os, market.params().mean_reversion);
    put(os, market.params().volatility);
    put(os, static_cast<std::uint64_t>(market.params().curve.tenors().size()));
    put_vector(os, market.params().curve.tenors());
    put_vector(os, market.params().curve.zeros());
    put_grid(os, market.grid());
    put_vector(os, market.short_rates());
    put_vector(os, market.discounts());
    put_vector(os, market.systematic_draws());
    atomic_write(path, os.str());
}

MarketScenarioSet ScenarioStore::load(const std::filesystem::path& path) {
    constexpr std::uint64_t kMagic = 0x4e45435358415643ULL;
    std::ifstream is(path, std::ios::binary);
    require(is.good(), "cannot open scenario store " + path.string());

    std::uint64_t magic = 0;
    std::uint32_t version = 0;
    get(is, magic);
    get(is, version);
    require(magic == kMagic && version == 1,
            "not a supported scenario store: " + path.string());

    MarketScenarioSet m;
    std::uint64_t n_paths = 0, n_sys = 0, n_pillars = 0;
    get(is, n_paths);
    get(is, n_sys);
    get(is, m.seed_);
    get(is, m.params_.mean_reversion);
    get(is, m.params_.volatility);
    get(is, n_pillars);
    std::vector<double> tenors, zeros;
    get_vector(is, tenors, n_pillars);
    get_vector(is, zeros, n_pillars);
    m.params_.curve = ZeroCurve(std::move(tenors), std::move(zeros));
    m.grid_ = get_grid(is);
    m.n_paths_ = n_paths;
    m.n_systematic_ = n_sys;
    const std::size_t n_times = m.grid_.size();
    get_vector(is, m.short_rate_, n_times * n_paths);
    get_vector(is, m.discount_, n_times * n_paths);
    get_vector(is, m.systematic_, (n_times - 1) * n_paths * n_sys);
    is.peek();
    require(is.eof(), "trailing bytes in scenario store " + path.string());
    return m;
}

void JobManifest::validate() const {
    std::vector<std::string> outputs, pairs;
    for (const auto& j : jobs) {
        outputs.push_back(j.output.string());
        pairs.push_back(j.deal_id + "\x1f" + j.scenario_id);
    }
    auto has_dup = [](std::vector<std::string>& v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) != v.end();
    };
    require(!has_dup(outputs), "manifest job outputs are not unique");
    require(!has_dup(pairs),
            "a deal/scenario-set pair appears more than once in the manifest");
}

std::string JobManifest::to_json() const {
    nlohmann::json doc;
    doc["jobs"] = nlohmann::json::array();
    for (const auto& j : jobs)
        doc["jobs"].push_back({{"deal", j.deal_id},
                               {"scenario_set", j.scenario_id},
                               {"seed", j.seed},
                               {"output", j.output.string()}});
    doc["scenario_sets"] = nlohmann::json::array();
    for (const auto& s : scenario_sets)
        doc["scenario_sets"].push_back({{"id", s.id},
                                        {"path", s.path.string()},
                                        {"grid_hash", s.grid_hash},
                                        {"params_hash", s.params_hash},
                                        {"n_paths", s.n_paths}});
    return doc.dump(2) + "\n";
}

JobManifest JobManifest::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad manifest JSON: ") + e.what());
    }
    JobManifest m;
    for (const auto& j : doc.at("jobs"))
        m.jobs.push_back({j.at("deal").get<std::string>(),
                          j.at("scenario_set").get<std::string>(),
                          j.at("seed").get<std::uint64_t>(),
                          j.at("output").get<std::string>()});
    for (const auto& s : doc.at("scenario_sets")) {
        ScenarioDescriptor d;
        d.id = s.at("id").get<std::string>();
        d.path = s.at("path").get<std::string>();
        d.grid_hash = s.at("grid_hash").get<std::uint64_t>();
        d.params_hash = s.at("params_hash").get<std::uint64_t>();
        d.n_paths = s.at("n_paths").get<std::uint64_t>();
        m.scenario_sets.push_back(std::move(d));
    }
    m.validate();
    return m;
}

JobManifest plan_jobs(const DealLibrary& deals,
                      const std::vector<ScenarioDescriptor>& scenario_sets,
                      const std::filesystem::path& output_dir) {
    require(deals.linear.size() + deals.bermudan.size() > 0,
            "empty portfolio: nothing to plan");
    require(!scenario_sets.empty(), "no scenario sets to plan against");
    for (const auto& [id, instr] : deals.bermudan)
        require(deals.linear.count(id) == 0, "duplicate deal id " + id);

    JobManifest m;
    m.scenario_sets = scenario_sets;
    std::vector<std::string> ids;
    for (const auto& [id, instr] : deals.linear) ids.push_back(id);
    for (const auto& [id, instr] : deals.bermudan) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (const auto& s : scenario_sets)
        for (const auto& id : ids) {
            Job j;
            j.deal_id = id;
            j.scenario_id = s.id;
            j.output = output_dir / (id + "." + s.id + ".cube");
            m.jobs.push_back(std::move(j));
        }
    m.validate();
    return m;
}

namespace {

const ScenarioDescriptor& find_scenario(const JobManifest& manifest,
                                        const std::string& id) {
    for (const auto& s : manifest.scenario_sets)
        if (s.id == id) return s;
    throw InputError("job references unknown scenario set " + id);
}

void write_sidecar(const std::filesystem::path& base, const char* ext,
                   const std::string& text) {
    atomic_write(std::filesystem::path(base) += ext, text);
}

} // namespace

void run_job(const Job& job, const DealLibrary& deals,
             const JobManifest& manifest) {
    try {
        const ScenarioDescriptor& desc = find_scenario(manifest, job.scenario_id);
        require(deals.contains(job.deal_id),
                "job references unknown deal " + job.deal_id);

        if (std::filesystem::exists(job.output)) {
            // Idempotence: accept an existing valid output, redo anything
            // unreadable or built on the wrong grid.
            try {
                load_cube(job.output, desc.grid_hash);
                write_sidecar(job.output, ".ok", "cached\n");
                return;
            } catch (const std::exception&) {
                std::filesystem::remove(job.output);
            }
        }

        const MarketScenarioSet market = ScenarioStore::load(desc.path);
        require(grid_hash(market.grid()) == desc.grid_hash &&
                    market.n_paths() == desc.n_paths,
                "scenario store does not match its manifest descriptor");

        ValueCube cube;
        if (auto it = deals.linear.find(job.deal_id); it != deals.linear.end())
            cube = value_cashflow_instrument(it->second, market);
        else
            cube = value_bermudan_swaption(deals.bermudan.at(job.deal_id),
                                           market);
        save_cube(cube, job.output);
        write_sidecar(job.output, ".ok", "done\n");
    } catch (const std::exception& e) {
        std::error_code ec;
        std::filesystem::remove(job.output, ec);
        write_sidecar(job.output, ".err", std::string(e.what()) + "\n");
        throw;
    }
}

RunReport run_manifest(const JobManifest& manifest, const DealLibrary& deals,
                       std::size_t n_workers) {
    manifest.validate();
    n_workers = std::max<std::size_t>(1, n_workers);

    RunReport report;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.jobs.size()) return;
            try {
                run_job(manifest.jobs[i], deals, manifest);
                std::lock_guard lock(mu);
                ++report.completed;
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                ++report.failed;
                report.errors.push_back(manifest.jobs[i].deal_id + "/" +
                                        manifest.jobs[i].scenario_id + ": " +
                                        e.what());
            }
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < n_workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::sort(report.errors.begin(), report.errors.end());
    return report;
}

} // namespace cvax
