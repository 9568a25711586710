#ifndef CVAX_HASHING_HPP
#define CVAX_HASHING_HPP

#include "cvax/market.hpp"
#include "cvax/timegrid.hpp"

#include <cstdint>
#include <string>

namespace cvax {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

std::uint64_t fnv1a(const void* data, std::size_t len,
                    std::uint64_t basis = kFnvOffset);
std::uint64_t fnv1a(const std::string& s, std::uint64_t basis = kFnvOffset);

// Provenance hashes stored in value-store headers.
std::uint64_t grid_hash(const TimeGrid& grid);
std::uint64_t params_hash(const HullWhiteParams& params);
std::uint64_t scenario_hash(const MarketScenarioSet& market);

} // namespace cvax

#endif
