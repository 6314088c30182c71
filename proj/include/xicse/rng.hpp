#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace xicse {

/// Counter-based stream: the i-th draw of stream `seed` is a SplitMix64 hash
/// of (seed, i), so any sample range can be replayed without the ones before it.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t counter) : seed_(seed), counter_(counter) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(seed_ ^ mix(counter_++)); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

/// Deterministic child seed from a root seed and a path of integers.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = CounterRng::mix(root);
    for (auto p : path) s = CounterRng::mix(s ^ CounterRng::mix(p + 0x632BE59BD9B4E019ULL));
    return s;
}

}  // namespace xicse
