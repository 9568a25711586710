#ifndef CVAX_RNG_HPP
#define CVAX_RNG_HPP

#include <array>
#include <cstdint>

namespace cvax {

// Counter-based generator (Philox 4x32-10, Salmon et al. 2011).
// Every draw is addressed by (seed, stream, a, b): distributed workers
// reproduce identical numbers with no shared state and no sequencing.
namespace philox {

std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                   const std::array<std::uint32_t, 2>& key);

} // namespace philox

// Logical draw streams. Keeping them disjoint guarantees e.g. that credit
// idiosyncratic draws never collide with market draws under any loadings.
enum class DrawStream : std::uint32_t {
    Systematic = 1,       // shared market/credit systematic shocks
    MarketIdiosyncratic = 2,
    MarketAux = 3,        // second normal for the exact short-rate integral
    CreditIdiosyncratic = 4,
    Threshold = 5,        // stochastic default-threshold diffusion
};

// Uniform in (0,1), keyed by (seed, stream, a, b). a/b address e.g.
// (time step, factor) and (path); callers define the convention per stream.
double uniform_draw(std::uint64_t seed, DrawStream stream,
                    std::uint64_t a, std::uint64_t b);

// Standard normal via inverse-CDF transform of uniform_draw.
double normal_draw(std::uint64_t seed, DrawStream stream,
                   std::uint64_t a, std::uint64_t b);

inline std::uint64_t pack32(std::uint64_t hi, std::uint64_t lo) {
    return (hi << 32) | (lo & 0xffffffffULL);
}

} // namespace cvax

#endif
