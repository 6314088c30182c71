#pragma once

// Seeded instance families for the verification suite.
//
// Every random number comes from std::mt19937_64, whose output sequence is
// fixed by the standard; the conversions to doubles and integers below are
// done by hand so the instances are identical across standard libraries.
// Weight entries are multiples of 1/8, which keeps c*phi exact in binary for
// dyadic c and lets the exact-rational checks compare values with ==.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xicse/harness/instance.hpp"

namespace xicse::harness {

enum class Profile { product, tropical, restrictable, productable, valuative };

Profile parse_profile(const std::string& name);
std::string to_string(Profile p);

/// Portable draws on top of mt19937_64.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [lo, hi].
    int integer(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }
    bool coin(double p) { return uniform() < p; }
    /// Multiple of 1/8 in [lo/8, hi/8].
    double eighths(int lo, int hi) { return integer(lo, hi) / 8.0; }

private:
    std::mt19937_64 gen_;
};

/// Deterministic in (seed, index, profile): instance i does not depend on count.
/// The productable profile returns 2*count specs; specs 2i and 2i+1 form a pair.
std::vector<InstanceSpec> generate_instances(std::uint64_t seed, std::size_t count, Profile profile);

// Building blocks, also used directly by the checks.
TropicalWeight random_axis_weight(Draw& d, std::size_t n);
TropicalWeight random_tropical_weight(Draw& d, std::size_t n, std::size_t pieces);
std::optional<TropicalWeight> random_psi(Draw& d, std::size_t n, bool allow_multi_piece);
MultiIndex random_multi_index(Draw& d, std::size_t n, int max_entry);
Functional random_functional(Draw& d, std::size_t n, std::size_t max_terms, int max_entry);
Germ random_germ(Draw& d, std::size_t n, std::size_t max_terms, int max_entry);

}  // namespace xicse::harness
