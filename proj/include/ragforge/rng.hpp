#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ragforge/text.hpp"

namespace ragforge::rng {

/// Deterministic random stream. Wraps mt19937_64 (bit-exact by the standard)
/// and implements its own bounded draws, because std::uniform_int_distribution
/// is implementation-defined and would break cross-platform reproducibility.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, n) via rejection sampling; n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(next_below(n));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Fisher-Yates shuffle, tied to this stream's draw order.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    /// Draws k distinct indices from [0, n) without replacement.
    std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                        std::size_t k);

private:
    std::mt19937_64 engine_;
};

/// Derives the seed of a per-record stream from the run seed and a stable
/// record key, so parallel pipelines stay reproducible and order-independent.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view key);

}  // namespace ragforge::rng
