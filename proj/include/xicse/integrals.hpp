#pragma once

// Masses of monomials on sublevel sets of toric weights,
//     d_a(t) = integral over {phi < -t} in the unit polydisc of |z^a|^2 e^{-psi},
// evaluated in log space. Closed forms cover monomial-max weights (a product
// of discs) and single-piece weights (a hypoexponential tail); everything else
// goes through importance-sampled Monte Carlo in log coordinates.

#include <cstdint>
#include <span>
#include <string>

#include "xicse/core.hpp"

namespace xicse {

enum class MassMethod { exact_product, exact_hypoexp, monte_carlo };
enum class MassStatus { ok, divergent, indeterminate };

std::string to_string(MassMethod m);
std::string to_string(MassStatus s);

struct MassResult {
    /// Natural log of the mass; -inf for an empty region, +inf when divergent.
    double log_value = 0.0;
    MassMethod method = MassMethod::exact_product;
    double stderr_log = 0.0;
    MassStatus status = MassStatus::ok;
    // Monte Carlo provenance.
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t accepted = 0;

    bool finite() const { return status == MassStatus::ok; }
    bool exact() const { return method != MassMethod::monte_carlo; }
};

/// Product of discs of radii e^{-w_i t} with e^{-psi} = prod |z_i|^{-2 rho_i}:
/// pi^n prod e^{-2(a_i + 1 - rho_i) w_i t} / (a_i + 1 - rho_i).
MassResult d_alpha_product(std::span<const double> w, std::span<const double> rho, const MultiIndex& alpha, double t);

/// I^k_a(s) = integral over {sum a_i x_i > s, x > 0} of e^{-<k, x>}.
double hypoexp_tail(std::span<const double> k, std::span<const double> a, double s);
double log_hypoexp_tail(std::span<const double> k, std::span<const double> a, double s);

struct McEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::uint64_t accepted = 0;
};

/// Plain Monte Carlo of I^k_a(s) through (1/prod k) P(sum (a_i/k_i) Y_i > s).
McEstimate mc_hypoexp_tail(std::span<const double> k, std::span<const double> a, double s, std::uint64_t samples,
                           std::uint64_t seed);

inline constexpr std::uint64_t kMinMcSamples = 10000;

/// Importance-sampled d_a(t). Bit-reproducible for fixed (seed, samples);
/// `threads` only changes how chunks are scheduled, not the result.
MassResult mc_mass(const WeightPair& pair, const MultiIndex& alpha, double t, std::uint64_t samples, std::uint64_t seed,
                   unsigned threads = 1);

/// Monte Carlo of the integral of |F|^2 e^{-psi} over {phi < -t} (random angles included).
MassResult mc_germ_mass(const WeightPair& pair, const Germ& f, double t, std::uint64_t samples, std::uint64_t seed,
                        unsigned threads = 1);

enum class MassMode { automatic, exact, monte_carlo };
enum class ExactRoute { product, hypoexp, none };

/// Which closed form applies to the pair, if any.
ExactRoute exact_route(const WeightPair& pair);

struct McOptions {
    std::uint64_t samples = 200000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Dispatcher. Offsets are normalized first: K for phi + a at t is K for phi at t + a.
MassResult d_alpha(const WeightPair& pair, const MultiIndex& alpha, double t, MassMode mode = MassMode::automatic,
                   const McOptions& mc = {});

}  // namespace xicse
