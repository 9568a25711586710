#include "cvax/rng.hpp"
#include "cvax/distributions.hpp"

namespace cvax {
namespace philox {

namespace {

constexpr std::uint32_t kW32A = 0x9E3779B9u;
constexpr std::uint32_t kW32B = 0xBB67AE85u;
constexpr std::uint32_t kM4x32A = 0xD2511F53u;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void round_once(std::array<std::uint32_t, 4>& ctr,
                       const std::array<std::uint32_t, 2>& key) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM4x32A, ctr[0], lo0, hi0);
    mulhilo(kM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

} // namespace

std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                   const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> ctr = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        round_once(ctr, k);
        k[0] += kW32A;
        k[1] += kW32B;
    }
    return ctr;
}

} // namespace philox

double uniform_draw(std::uint64_t seed, DrawStream stream, std::uint64_t a,
                    std::uint64_t b) {
    // Stream folded into the key so streams are independent permutations.
    const std::uint64_t key64 = seed ^ (static_cast<std::uint64_t>(stream) *
                                        0x9E3779B97F4A7C15ULL);
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(key64),
        static_cast<std::uint32_t>(key64 >> 32)};
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    const auto out = philox::block(ctr, key);
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    // 53-bit mantissa, strictly inside (0,1).
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double normal_draw(std::uint64_t seed, DrawStream stream, std::uint64_t a,
                   std::uint64_t b) {
    return normal_quantile(uniform_draw(seed, stream, a, b));
}

} // namespace cvax
