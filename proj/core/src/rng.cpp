#include "pslab/rng.hpp"

#include "pslab/stats.hpp"

namespace pslab {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::from_seed(std::uint64_t master_seed, std::uint64_t purpose,
                               std::uint64_t index) {
    std::uint64_t k = mix(master_seed + kGamma);
    k = mix(k ^ purpose);
    k = mix(k + index * 0xD1342543DE82EF95ULL);
    return RngStream(k);
}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_quantile(uniform_open()); }

std::uint64_t RngStream::below(std::uint64_t bound) {
    // 53-bit scaling; bias is negligible for the bounds used here (< 2^32).
    auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
    return v < bound ? v : bound - 1;
}

}  // namespace pslab
