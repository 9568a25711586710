#ifndef CVAX_GRIDSTORE_HPP
#define CVAX_GRIDSTORE_HPP

#include "cvax/cube.hpp"
#include "cvax/hashing.hpp"
#include "cvax/instruments.hpp"
#include "cvax/market.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cvax {

// Fixed part of the value-store file header. Binary, little-endian; the
// deal id and grid times follow as variable-length sections.
struct ValueStoreHeader {
    static constexpr std::uint64_t kMagic = 0x4542554358415643ULL; // "CVAXCUBE"
    static constexpr std::uint32_t kVersion = 1;

    std::uint64_t magic = kMagic;
    std::uint32_t version = kVersion;
    std::uint32_t layout = 0; // 0: time-major f64
    std::uint64_t grid_length = 0;
    std::uint64_t n_paths = 0;
    std::uint64_t grid_hash = 0;
    std::uint64_t seed = 0;
    std::uint32_t has_exercise = 0;
    std::string deal_id;

    std::string dump() const;
};

// Atomic (write-temp-then-rename) persistence; re-saving the same cube is
// byte-identical.
void save_cube(const ValueCube& cube, const std::filesystem::path& path);
ValueCube load_cube(const std::filesystem::path& path,
                    std::optional<std::uint64_t> expected_grid_hash = {});

// Market scenario persistence in the same store format family, so workers
// can regenerate-free load the shared set.
class ScenarioStore {
public:
    static void save(const MarketScenarioSet& market,
                     const std::filesystem::path& path);
    static MarketScenarioSet load(const std::filesystem::path& path);
};

struct Job {
    std::string deal_id;
    std::string scenario_id;
    std::uint64_t seed = 0;
    std::filesystem::path output;
};

struct ScenarioDescriptor {
    std::string id;
    std::filesystem::path path;
    std::uint64_t grid_hash = 0;
    std::uint64_t params_hash = 0;
    std::uint64_t n_paths = 0;
};

struct JobManifest {
    std::vector<Job> jobs;
    std::vector<ScenarioDescriptor> scenario_sets;

    void validate() const; // unique outputs, unique (deal, set) pairs
    std::string to_json() const;
    static JobManifest from_json(const std::string& text);
};

// Deals a worker can price: linear instruments and Bermudan swaptions.
struct DealLibrary {
    std::map<std::string, CashflowInstrument> linear;
    std::map<std::string, BermudanSwaption> bermudan;

    bool contains(const std::string& id) const {
        return linear.count(id) != 0 || bermudan.count(id) != 0;
    }
};

// One job per deal x scenario set. Collapsed instruments count as single
// deals. Rejects duplicate deal ids and empty inputs.
JobManifest plan_jobs(const DealLibrary& deals,
                      const std::vector<ScenarioDescriptor>& scenario_sets,
                      const std::filesystem::path& output_dir);

// Values the job's deal on its scenario set and writes the cube plus a
// .ok sidecar; failures leave a .err sidecar and no partial output.
// Idempotent: an existing valid output is left untouched.
void run_job(const Job& job, const DealLibrary& deals,
             const JobManifest& manifest);

struct RunReport {
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::vector<std::string> errors;
};

// Deterministic parallel execution: any worker count yields byte-identical
// output files.
RunReport run_manifest(const JobManifest& manifest, const DealLibrary& deals,
                       std::size_t n_workers);

} // namespace cvax

#endif
