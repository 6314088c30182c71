#include "xicse/exponents.hpp"

#include <cmath>
#include <limits>

#include "xicse/polytope.hpp"

namespace xicse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtendedExponent not_integrable() {
    ExtendedExponent e = ExtendedExponent::finite(0.0, Rational(0));
    e.marker = ExponentMarker::not_psi_integrable;
    return e;
}

ExtendedExponent from_rational(const Rational& r) { return ExtendedExponent::finite(to_double(r), r); }

std::vector<double> psi_slope(const WeightPair& pair) {
    if (pair.psi_is_zero()) return std::vector<double>(pair.dimension(), 0.0);
    return pair.psi()->pieces().front();
}

ExtendedExponent closed_form(const MultiIndex& alpha, const WeightPair& pair, bool exact) {
    const std::size_t n = pair.dimension();
    const auto mu = psi_slope(pair);
    if (exact) {
        // Scales straight from the pieces, so the value matches the rational LP.
        std::vector<Rational> w(n, Rational(0));
        for (const auto& p : pair.phi().pieces())
            for (std::size_t i = 0; i < n; ++i)
                if (p[i] != 0.0) w[i] = Rational(1) / to_rational(p[i]);
        Rational sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            sum += (Rational(alpha[i] + 1) - to_rational(mu[i]) / 2) * w[i];
        return from_rational(2 * sum);
    }
    const auto w = *pair.phi().axis_scales();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += (alpha[i] + 1.0 - 0.5 * mu[i]) * w[i];
    return ExtendedExponent::finite(2.0 * sum);
}

ExtendedExponent by_lp(const MultiIndex& alpha, const WeightPair& pair, bool exact) {
    if (exact) {
        const auto forms = jumping_objective_exact(alpha, pair);
        return from_rational(threshold_lp_exact(forms, pair.phi().pieces()).value);
    }
    const auto forms = jumping_objective(alpha, pair);
    return ExtendedExponent::finite(std::max(0.0, threshold_lp(forms, pair.phi().pieces()).value));
}

ExtendedExponent by_bisection(const MultiIndex& alpha, const WeightPair& pair, const ExponentOptions& opts) {
    LpOptions lp;
    lp.exact_rational = opts.exact_rational;
    double lo = 0.0;
    double hi = 1.0;
    while (ideal_membership(alpha, hi, pair, lp)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e18) throw NumericFailure("jumping number bisection found no upper bound");
    }
    for (int it = 0; it < opts.bisection_max_iter && hi - lo > opts.bisection_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ideal_membership(alpha, mid, pair, lp))
            lo = mid;
        else
            hi = mid;
    }
    return ExtendedExponent::finite(0.5 * (lo + hi));
}

}  // namespace

ExtendedExponent ExtendedExponent::finite(double v, std::optional<Rational> exact_value) {
    ExtendedExponent e;
    e.kind = ExponentKind::finite;
    e.value = v;
    e.exact = std::move(exact_value);
    return e;
}

ExtendedExponent ExtendedExponent::neg_infinity() {
    ExtendedExponent e;
    e.kind = ExponentKind::neg_infinity;
    e.value = -kInf;
    return e;
}

ExtendedExponent ExtendedExponent::pos_infinity() {
    ExtendedExponent e;
    e.kind = ExponentKind::pos_infinity;
    e.value = kInf;
    return e;
}

double ExtendedExponent::as_double() const {
    switch (kind) {
        case ExponentKind::neg_infinity: return -kInf;
        case ExponentKind::pos_infinity: return kInf;
        case ExponentKind::finite: break;
    }
    return value;
}

std::string to_string(const ExtendedExponent& e) {
    switch (e.kind) {
        case ExponentKind::neg_infinity: return "-inf";
        case ExponentKind::pos_infinity: return "+inf";
        case ExponentKind::finite: break;
    }
    return format_double(e.value);
}

bool has_closed_form(const WeightPair& pair) {
    return pair.phi().axis_scales().has_value() && (pair.psi_is_zero() || pair.psi()->single_piece());
}

ExtendedExponent monomial_jumping_number(const MultiIndex& alpha, const WeightPair& pair,
                                         const ExponentOptions& opts) {
    if (alpha.dimension() != pair.dimension()) throw DimensionError("multi-index dimension does not match the weights");
    LpOptions lp;
    lp.exact_rational = opts.exact_rational;
    if (!psi_integrable(alpha, pair, lp)) return not_integrable();
    switch (opts.method) {
        case JumpingMethod::closed_form:
            if (!has_closed_form(pair)) throw NotAvailable("no closed-form jumping number for this weight pair");
            return closed_form(alpha, pair, opts.exact_rational);
        case JumpingMethod::lp: return by_lp(alpha, pair, opts.exact_rational);
        case JumpingMethod::bisection: return by_bisection(alpha, pair, opts);
        case JumpingMethod::automatic: break;
    }
    if (has_closed_form(pair)) return closed_form(alpha, pair, opts.exact_rational);
    return by_lp(alpha, pair, opts.exact_rational);
}

namespace {

bool less_than(const ExtendedExponent& a, const ExtendedExponent& b) {
    if (a.exact && b.exact) return *a.exact < *b.exact;
    return a.value < b.value;
}

}  // namespace

ExtendedExponent gamma(const Functional& xi, const WeightPair& pair, const ExponentOptions& opts) {
    if (xi.dimension() != pair.dimension()) throw DimensionError("functional and weights differ in dimension");
    if (xi.infinite_tail()) return ExtendedExponent::pos_infinity();
    std::optional<ExtendedExponent> best;
    for (const auto& [alpha, c] : xi.terms()) {
        ExtendedExponent e = monomial_jumping_number(alpha, pair, opts);
        if (e.marker == ExponentMarker::not_psi_integrable) continue;
        if (!best || less_than(*best, e)) best = std::move(e);
    }
    if (!best) return ExtendedExponent::neg_infinity();
    return *best;
}

ExtendedExponent jumping_number(const Germ& f, const WeightPair& pair, const ExponentOptions& opts) {
    if (f.dimension() != pair.dimension()) throw DimensionError("germ and weights differ in dimension");
    if (f.empty()) throw InvalidArgument("jumping number of the zero germ is not defined");
    std::optional<ExtendedExponent> best;
    for (const auto& [alpha, c] : f.terms()) {
        ExtendedExponent e = monomial_jumping_number(alpha, pair, opts);
        if (e.marker == ExponentMarker::not_psi_integrable) return e;
        if (!best || less_than(e, *best)) best = std::move(e);
    }
    return *best;
}

ExtendedExponent cse(const WeightPair& pair, const ExponentOptions& opts) {
    return jumping_number(Germ::constant(pair.dimension()), pair, opts);
}

Valuation::Valuation(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw InvalidArgument("valuation needs at least one weight");
    for (double v : w_)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("valuation weights must be positive");
}

double kiselman(const Valuation& nu, const TropicalWeight& phi) { return phi.gauge(nu.weights()); }

namespace {

double pairing(const Valuation& nu, const MultiIndex& alpha) {
    if (alpha.dimension() != nu.dimension()) throw DimensionError("valuation and multi-index differ in dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < nu.dimension(); ++i) s += alpha[i] * nu.weights()[i];
    return s;
}

}  // namespace

double valuation_of_germ(const Valuation& nu, const Germ& f) {
    if (f.dimension() != nu.dimension()) throw DimensionError("valuation and germ differ in dimension");
    double best = kInf;
    for (const auto& [alpha, c] : f.terms()) best = std::min(best, pairing(nu, alpha));
    return best;
}

double valuation_of_functional(const Valuation& nu, const Functional& xi) {
    if (xi.dimension() != nu.dimension()) throw DimensionError("valuation and functional differ in dimension");
    if (xi.infinite_tail()) return kInf;
    double best = -kInf;
    for (const auto& [alpha, c] : xi.terms()) best = std::max(best, pairing(nu, alpha));
    return best;
}

double thinness(const Valuation& nu) {
    double s = 0.0;
    for (double v : nu.weights()) s += v;
    return s;
}

bool ell_I_membership(const Functional& xi, double c, const WeightPair& pair, const ExponentOptions& opts) {
    if (xi.dimension() != pair.dimension()) throw DimensionError("functional and weights differ in dimension");
    if (xi.infinite_tail())
        throw UndefinedForInfiniteTail("annihilation of an ideal needs every coefficient of the functional");
    if (xi.empty()) return false;
    LpOptions lp;
    lp.exact_rational = opts.exact_rational;
    for (const auto& [alpha, coeff] : xi.terms())
        if (ideal_membership(alpha, c, pair, lp)) return false;
    return true;
}

Functional computing_functional(const Germ& f, const WeightPair& pair, const ExponentOptions& opts) {
    const ExtendedExponent target = jumping_number(f, pair, opts);
    if (!target.is_finite() || target.marker != ExponentMarker::none || !(target.value > 0.0))
        throw NotAvailable("computing functional needs a positive finite jumping number");
    // Support is iterated in lexicographic order; strict comparison keeps the first minimizer.
    std::optional<MultiIndex> best;
    std::optional<ExtendedExponent> best_value;
    for (const auto& [alpha, c] : f.terms()) {
        ExtendedExponent e = monomial_jumping_number(alpha, pair, opts);
        if (!best_value || less_than(e, *best_value)) {
            best = alpha;
            best_value = std::move(e);
        }
    }
    return Functional::delta(*best);
}

GammaEstimate gamma_numeric(const Functional& xi, const WeightPair& pair, double t_max, std::size_t points,
                            const KernelOptions& kopts, const ExponentOptions& eopts) {
    if (points < 2) throw InvalidArgument("gamma_numeric needs at least two grid points");
    if (!(t_max > 0.0)) throw InvalidArgument("gamma_numeric needs t_max > 0");
    GammaEstimate out;
    out.exact = gamma(xi, pair, eopts);
    out.curve = kernel_curve(xi, pair, linear_grid(0.0, t_max, points), kopts);
    const double last = out.curve.secant(points - 1);
    out.estimate = std::isnan(last) ? -kInf : last;
    out.lower = out.estimate;
    // A sampled secant is only a lower approximation up to its own noise; the two
    // endpoints come from independent streams.
    const double se_hi = out.curve.stderr_log[points - 1];
    const double se_lo = out.curve.stderr_log[points - 2];
    if (std::isfinite(out.lower) && (se_hi > 0.0 || se_lo > 0.0))
        out.lower -= 3.0 * std::hypot(se_hi, se_lo) / (out.curve.grid[points - 1] - out.curve.grid[points - 2]);
    out.upper = out.exact->is_finite() ? out.exact->value : kInf;
    return out;
}

}  // namespace xicse
