#pragma once

// Newton convex bodies and multiplier-ideal membership for toric weights.
//
// In log coordinates x_i = -log|z_i| the integral of |z^a|^2 e^{-c phi - psi}
// near the origin becomes (2 pi)^n times the integral over the orthant of
// exp(-h_c(x)), where
//     h_c(x) = <2a + 2, x> - c g_phi(x) - g_psi(x)
// is convex, piecewise linear and positively homogeneous. It converges iff
// h_c > 0 on the standard simplex, which is one small LP.

#include <cstddef>
#include <span>
#include <vector>

#include "xicse/core.hpp"
#include "xicse/lp.hpp"

namespace xicse {

struct LpOptions {
    /// Boundary band for Newton-body classification.
    double tol = 1e-9;
    /// Decide every sign in exact rational arithmetic.
    bool exact_rational = false;
};

/// P(phi) = conv{lambda_j} + R_+^n.
struct NewtonBody {
    std::vector<std::vector<double>> generators;

    explicit NewtonBody(const TropicalWeight& phi) : generators(phi.pieces()) {}
    explicit NewtonBody(std::vector<std::vector<double>> gens);

    std::size_t dimension() const { return generators.front().size(); }
};

enum class NewtonClass { outside, boundary, interior };

struct NewtonMembership {
    NewtonClass kind = NewtonClass::outside;
    /// min over the simplex of <mu, x> - g(x): the largest eps with mu - eps*1 in P.
    double margin = 0.0;
};

NewtonMembership newton_membership(const NewtonBody& body, std::span<const double> mu, const LpOptions& opts = {});

/// Forms whose max is h_c (one per pair of phi and psi pieces).
std::vector<LinearForm> ideal_forms(const MultiIndex& alpha, double c, const WeightPair& pair);

/// z^alpha in I(c phi + psi)_o. A zero LP value means divergence along a ray,
/// so membership is strict; values within 1e-9 of zero are re-decided exactly.
bool ideal_membership(const MultiIndex& alpha, double c, const WeightPair& pair, const LpOptions& opts = {});

/// z^alpha in I(psi)_o.
bool psi_integrable(const MultiIndex& alpha, const WeightPair& pair, const LpOptions& opts = {});

/// min max_k <a_k, x> subject to <lambda_j, x> >= 1 for every phi piece, x >= 0.
/// The optimum must be nonnegative (callers check integrability first).
template <class Scalar>
struct ThresholdLpResult {
    Scalar value{};
    std::vector<Scalar> argmin;
};

ThresholdLpResult<double> threshold_lp(std::span<const std::vector<double>> objective_forms,
                                       std::span<const std::vector<double>> constraint_pieces);
ThresholdLpResult<Rational> threshold_lp_exact(std::span<const std::vector<Rational>> objective_forms,
                                               std::span<const std::vector<double>> constraint_pieces);

/// The objective forms 2a + 2 - mu_k of the jumping-number LP.
std::vector<std::vector<double>> jumping_objective(const MultiIndex& alpha, const WeightPair& pair);
std::vector<std::vector<Rational>> jumping_objective_exact(const MultiIndex& alpha, const WeightPair& pair);

}  // namespace xicse
