#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dar {

/// Seeded random stream with a platform-independent sample sequence.
///
/// The engine is std::mt19937_64, whose output is fully specified by the
/// standard. The distribution layer (uniform doubles, bounded integers,
/// Gaussians) is implemented here rather than through <random>
/// distributions, whose algorithms are implementation-defined.
class RngStream {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64/polar-gauss-v1";

    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::string_view algorithm() const noexcept { return kAlgorithm; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal via the Marsaglia polar method.
    double normal();

    /// Child stream whose seed depends on this stream's seed and a label only.
    [[nodiscard]] RngStream child(std::string_view label) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Stable child-seed derivation from (master seed, trial index, stream label).
/// Adding a new label never changes the seeds of existing labels.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view label) noexcept;

/// In-place Fisher-Yates shuffle driven by the stream.
template <typename T>
void shuffle(std::vector<T>& items, RngStream& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_index(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// k distinct integers drawn uniformly from [0, n), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, RngStream& rng);

}  // namespace dar
