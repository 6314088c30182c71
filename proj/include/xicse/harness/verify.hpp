#pragma once

// Property-based verification suite. Each check draws its own seeded
// instances, compares the two sides of one statement and reports the worst
// margin seen. Exact checks fail on any violation; Monte Carlo comparisons are
// judged in standard errors: within 3 is a pass, a small share of (3, 4] is
// tolerated across the suite, beyond 4 fails.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "xicse/harness/instance.hpp"

namespace xicse::harness {

struct VerifyOptions {
    std::uint64_t seed = 7;
    /// Base instance count; each check scales it (e.g. 5x for the tail bound).
    std::size_t instances = 100;
    std::uint64_t samples = 200000;
    double tol = 1e-9;
    /// Checks run concurrently; results are identical for any value.
    unsigned threads = 1;
    /// Run only these keys (all when empty).
    std::set<std::string> only;
};

struct CheckResult {
    std::string key;
    std::string statement;
    std::size_t instances = 0;
    std::size_t comparisons = 0;
    std::size_t violations = 0;
    /// Smallest and largest margin (rhs - lhs in the direction of the inequality).
    double min_slack = 0.0;
    double max_slack = 0.0;
    std::size_t mc_comparisons = 0;
    /// Monte Carlo comparisons that landed between 3 and 4 standard errors.
    std::size_t soft_exceedances = 0;
    std::vector<Json> counterexamples;
    double runtime_s = 0.0;

    std::size_t allowance() const { return (mc_comparisons + 99) / 100; }
    bool passed() const { return violations == 0 && soft_exceedances <= allowance(); }
};

struct VerificationReport {
    VerifyOptions options;
    std::vector<CheckResult> checks;

    bool passed() const;
    /// Byte-deterministic unless timing is requested.
    Json to_json(bool timing = false) const;
    std::string to_text(bool timing = false) const;
};

/// Keys in report order.
const std::vector<std::string>& check_keys();

VerificationReport run_verification(const VerifyOptions& opts);

}  // namespace xicse::harness
