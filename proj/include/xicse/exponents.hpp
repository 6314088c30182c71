#pragma once

// Singularity exponents of toric weight pairs.
//
// For a monomial z^a the jumping number c*(a) = sup{c : z^a in I(c phi + psi)}
// is the fractional LP
//     min max_k <2a + 2 - mu_k, x>  subject to  <lambda_j, x> >= 1, x >= 0,
// once z^a is known to be psi-integrable. Everything else here reduces to it:
// gamma_xi is the max of c* over the psi-integrable support of xi, the jumping
// number of a germ is the min over its support.

#include <optional>
#include <string>
#include <vector>

#include "xicse/core.hpp"
#include "xicse/kernels.hpp"
#include "xicse/lp.hpp"

namespace xicse {

enum class ExponentKind { finite, neg_infinity, pos_infinity };

/// Extra information attached to a finite value.
enum class ExponentMarker { none, not_psi_integrable };

struct ExtendedExponent {
    ExponentKind kind = ExponentKind::finite;
    double value = 0.0;
    ExponentMarker marker = ExponentMarker::none;
    /// Present when the value was computed in rational arithmetic.
    std::optional<Rational> exact;

    static ExtendedExponent finite(double v, std::optional<Rational> exact_value = std::nullopt);
    static ExtendedExponent neg_infinity();
    static ExtendedExponent pos_infinity();

    bool is_finite() const { return kind == ExponentKind::finite; }
    /// value, or +-inf.
    double as_double() const;

    bool operator==(const ExtendedExponent&) const = default;
};

std::string to_string(const ExtendedExponent& e);

enum class JumpingMethod { automatic, closed_form, lp, bisection };

struct ExponentOptions {
    JumpingMethod method = JumpingMethod::automatic;
    /// Solve every LP (and closed form) over the rationals.
    bool exact_rational = false;
    /// Bisection stopping rule.
    double bisection_tol = 1e-10;
    int bisection_max_iter = 200;
};

/// True when c* has the closed form 2 <a + 1 - mu/2, w> (axis pieces, psi zero or one piece).
bool has_closed_form(const WeightPair& pair);

ExtendedExponent monomial_jumping_number(const MultiIndex& alpha, const WeightPair& pair,
                                         const ExponentOptions& opts = {});

ExtendedExponent gamma(const Functional& xi, const WeightPair& pair, const ExponentOptions& opts = {});

/// c^F_o(phi, psi); 0 with the not-psi-integrable marker when some monomial of F is not.
ExtendedExponent jumping_number(const Germ& f, const WeightPair& pair, const ExponentOptions& opts = {});

/// c_o(phi, psi) = c^1_o(phi, psi).
ExtendedExponent cse(const WeightPair& pair, const ExponentOptions& opts = {});

/// Monomial valuation nu_w with positive weights.
class Valuation {
public:
    explicit Valuation(std::vector<double> w);
    const std::vector<double>& weights() const { return w_; }
    std::size_t dimension() const { return w_.size(); }

private:
    std::vector<double> w_;
};

/// nu_w(phi) = g_phi(w).
double kiselman(const Valuation& nu, const TropicalWeight& phi);
/// min over the support of <a, w>.
double valuation_of_germ(const Valuation& nu, const Germ& f);
/// max over the support of <a, w>; +inf for an infinite tail, -inf for the zero functional.
double valuation_of_functional(const Valuation& nu, const Functional& xi);
/// A(nu_w) = sum w_i.
double thinness(const Valuation& nu);

/// xi is nonzero and annihilates I(c phi + psi)_o.
bool ell_I_membership(const Functional& xi, double c, const WeightPair& pair, const ExponentOptions& opts = {});

/// delta at the (lexicographically first) support monomial of F with the smallest jumping number.
Functional computing_functional(const Germ& f, const WeightPair& pair, const ExponentOptions& opts = {});

struct GammaEstimate {
    /// Last secant slope of log K.
    double estimate = 0.0;
    /// The estimate, less three standard errors of the secant on sampled curves.
    double lower = 0.0;
    /// Exact gamma when it is finite, +inf otherwise.
    double upper = 0.0;
    std::optional<ExtendedExponent> exact;
    KernelCurve curve;
};

/// gamma from the slope of log K on an even grid over [0, t_max] with `points` points.
GammaEstimate gamma_numeric(const Functional& xi, const WeightPair& pair, double t_max, std::size_t points,
                            const KernelOptions& kopts = {}, const ExponentOptions& eopts = {});

}  // namespace xicse
