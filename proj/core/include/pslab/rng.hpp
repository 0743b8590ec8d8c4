#pragma once

#include <cstdint>

namespace pslab {

/// Counter-based random stream (splitmix64 output function).
///
/// The i-th output is a pure function of (key, i), so streams for different
/// purposes never perturb each other: changing how many draws one stream
/// consumes leaves every other stream untouched. Streams are cheap value
/// types; copying one forks the sequence position.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    /// Stream keyed by (master seed, purpose tag, index). Equal triples give
    /// identical sequences on every platform.
    static RngStream from_seed(std::uint64_t master_seed, std::uint64_t purpose,
                               std::uint64_t index = 0);

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform on the open interval (0, 1); safe input for quantile functions.
    double uniform_open();

    /// Standard normal deviate via the inverse-CDF method (one draw each).
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, bound). bound must be >= 1.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Purpose tags for stream derivation. Distinct constants keep the covariate,
/// treatment, and outcome draws of a cohort independent of each other and of
/// harness-level resampling.
namespace stream_purpose {
inline constexpr std::uint64_t covariates = 0x636f766172696174ULL;
inline constexpr std::uint64_t treatment = 0x74726561746d656eULL;
inline constexpr std::uint64_t outcome = 0x6f7574636f6d6521ULL;
inline constexpr std::uint64_t subsample = 0x73756273616d706cULL;
inline constexpr std::uint64_t matching = 0x6d61746368696e67ULL;
inline constexpr std::uint64_t oracle = 0x6f7261636c650000ULL;
inline constexpr std::uint64_t generic = 0x67656e6572696300ULL;
}  // namespace stream_purpose

}  // namespace pslab
