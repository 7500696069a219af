#include "dar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dar/error.hpp"

namespace dar {

double RngStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0) {
        throw InvalidArgument("uniform_index: n must be positive");
    }
    // Rejection on the top of the range keeps the result unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

double RngStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    double a = 0.0;
    double b = 0.0;
    double s = 0.0;
    do {
        a = 2.0 * uniform() - 1.0;
        b = 2.0 * uniform() - 1.0;
        s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = b * f;
    has_cached_ = true;
    return a * f;
}

RngStream RngStream::child(std::string_view label) const {
    return RngStream(derive_seed(seed_, 0, label));
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view label) noexcept {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    return splitmix64(s ^ fnv1a64(label));
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, RngStream& rng) {
    if (k > n) {
        throw InvalidArgument("sample_without_replacement: k=" + std::to_string(k) +
                              " exceeds population " + std::to_string(n));
    }
    // Partial Fisher-Yates over an index table.
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace dar
