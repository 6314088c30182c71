#include "xicse/harness/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "xicse/exponents.hpp"
#include "xicse/harness/generators.hpp"
#include "xicse/integrals.hpp"
#include "xicse/kernels.hpp"
#include "xicse/polytope.hpp"
#include "xicse/rng.hpp"

namespace xicse::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCounterexamples = 5;

class Recorder {
public:
    explicit Recorder(CheckResult& r) : r_(r) {
        r_.min_slack = kInf;
        r_.max_slack = -kInf;
    }

    /// One exact comparison; negative slack is a violation.
    template <class Echo>
    void slack(double s, const Echo& echo) {
        ++r_.comparisons;
        r_.min_slack = std::min(r_.min_slack, s);
        r_.max_slack = std::max(r_.max_slack, s);
        if (!(s >= 0.0)) fail(echo, s);
    }

    /// One Monte Carlo comparison of two log values; sigma is the combined stderr of the difference.
    template <class Echo>
    void mc(double diff, double sigma, const Echo& echo) {
        ++r_.comparisons;
        ++r_.mc_comparisons;
        const double z = sigma > 0.0 ? std::fabs(diff) / sigma : (diff == 0.0 ? 0.0 : kInf);
        r_.min_slack = std::min(r_.min_slack, 3.0 - z);
        r_.max_slack = std::max(r_.max_slack, 3.0 - z);
        if (z <= 3.0) return;
        if (z <= 4.0) {
            ++r_.soft_exceedances;
            return;
        }
        fail(echo, 3.0 - z);
    }

    void instance() { ++r_.instances; }

private:
    template <class Echo>
    void fail(const Echo& echo, double s) {
        ++r_.violations;
        if (r_.counterexamples.size() < kMaxCounterexamples) {
            Json j = echo();
            j["slack"] = number_or_string(s);
            r_.counterexamples.push_back(std::move(j));
        }
    }

    CheckResult& r_;
};

std::size_t scaled_count(const VerifyOptions& o, double factor) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(o.instances) * factor)));
}

std::uint64_t check_seed(const VerifyOptions& o, std::uint64_t tag) { return derive_seed(o.seed, {0xC0FFEEull, tag}); }

ExponentOptions exact_options() {
    ExponentOptions e;
    e.exact_rational = true;
    return e;
}

/// Relative closeness of two log values, scaled so large logs get proportional room.
double log_scale(double a) { return std::max(1.0, std::fabs(a)); }

/// Single-piece version of a pair: first phi piece, first psi piece.
WeightPair single_piece_version(const WeightPair& p) {
    std::optional<TropicalWeight> psi;
    if (p.psi()) psi = TropicalWeight({p.psi()->pieces().front()});
    return WeightPair(TropicalWeight({p.phi().pieces().front()}), std::move(psi));
}

WeightPair without_psi(const WeightPair& p) { return WeightPair(p.phi()); }

WeightPair scaled_pair(const WeightPair& p, double c) { return WeightPair(p.phi().scaled(c), p.psi()); }

/// Alternating product and single-piece instances: both have closed-form masses.
std::vector<InstanceSpec> exact_path_instances(std::uint64_t seed, std::size_t count) {
    auto product = generate_instances(seed, (count + 1) / 2, Profile::product);
    auto tropical = generate_instances(seed ^ 0x5bd1e995ull, count / 2, Profile::tropical);
    std::vector<InstanceSpec> out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 2 == 0) {
            out.push_back(std::move(product[i / 2]));
        } else {
            InstanceSpec s = std::move(tropical[i / 2]);
            s.pair = single_piece_version(s.pair);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<InstanceSpec> mixed_instances(std::uint64_t seed, std::size_t count) {
    auto product = generate_instances(seed, (count + 1) / 2, Profile::product);
    auto tropical = generate_instances(seed ^ 0x5bd1e995ull, count / 2, Profile::tropical);
    std::vector<InstanceSpec> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(i % 2 == 0 ? std::move(product[i / 2]) : std::move(tropical[i / 2]));
    return out;
}

Json echo(const InstanceSpec& spec, Json extra = Json::object()) {
    Json j{{"instance", to_json(spec)}};
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

Json echo_pair(const WeightPair& p, Json extra = Json::object()) {
    InstanceSpec s(p);
    return echo(s, std::move(extra));
}

bool exponent_equal(const ExtendedExponent& a, const ExtendedExponent& b) {
    if (a.kind != b.kind) return false;
    if (!a.is_finite()) return true;
    if (a.exact && b.exact) return *a.exact == *b.exact;
    return a.value == b.value;
}

// ------------------------------------------------------------------ checks

void check_convexity(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    for (const auto& spec : exact_path_instances(check_seed(o, 1), o.instances)) {
        rec.instance();
        for (const auto& xi : spec.functionals) {
            const auto curve = kernel_curve(xi, spec.pair, spec.grid);
            if (curve.log_k.front() == -kInf) continue;
            for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
                const double sd = curve.second_difference(i);
                rec.slack(sd + o.tol, [&] { return echo(spec, {{"functional", to_json(xi)}, {"t", curve.grid[i]}, {"second_difference", sd}}); });
            }
        }
    }
}

void check_monotone_gap(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const ExponentOptions ex = exact_options();
    for (const auto& base : exact_path_instances(check_seed(o, 2), o.instances)) {
        rec.instance();
        for (const auto& xi : base.functionals) {
            // The natural pair, and the pair rescaled by a power of two so that gamma <= 1.
            std::vector<WeightPair> pairs{base.pair};
            const auto g = gamma(xi, base.pair, ex);
            if (g.is_finite() && g.value > 1.0) pairs.push_back(scaled_pair(base.pair, std::exp2(std::ceil(std::log2(g.value)))));
            for (const auto& p : pairs) {
                if (!ell_I_membership(xi, 1.0, p, ex)) continue;
                const auto curve = kernel_curve(xi, p, base.grid);
                if (curve.log_k.front() == -kInf) continue;
                for (std::size_t i = 1; i < curve.size(); ++i) {
                    const double step = (curve.grid[i] - curve.log_k[i]) - (curve.grid[i - 1] - curve.log_k[i - 1]);
                    rec.slack(step + o.tol, [&] { return echo_pair(p, {{"functional", to_json(xi)}, {"t", curve.grid[i]}, {"step", step}}); });
                }
            }
        }
    }
}

void check_scaling(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const ExponentOptions ex = exact_options();
    std::size_t i = 0;
    for (const auto& spec : mixed_instances(check_seed(o, 3), o.instances)) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 3), {i++}));
        const double c = d.integer(1, 16) / 4.0;
        const double a = d.eighths(-8, 8);
        const WeightPair cphi = scaled_pair(spec.pair, c);
        const WeightPair shifted(spec.pair.phi().with_offset(a), spec.pair.psi());
        for (const auto& xi : spec.functionals) {
            const auto g = gamma(xi, spec.pair, ex);
            const auto gc = gamma(xi, cphi, ex);
            ExtendedExponent expected = g;
            if (g.is_finite()) expected = ExtendedExponent::finite(g.value / c, *g.exact / to_rational(c));
            rec.slack(exponent_equal(gc, expected) ? 0.0 : -1.0, [&] {
                return echo(spec, {{"functional", to_json(xi)}, {"c", c}, {"gamma", to_json(g)}, {"gamma_scaled", to_json(gc)}});
            });
            const auto gs = gamma(xi, shifted, ex);
            rec.slack(exponent_equal(gs, g) ? 0.0 : -1.0, [&] {
                return echo(spec, {{"functional", to_json(xi)}, {"offset", a}, {"gamma", to_json(g)}, {"gamma_shifted", to_json(gs)}});
            });
            if (exact_route(spec.pair) == ExactRoute::none) continue;
            // Kernel identities behind the exponent laws.
            for (double t : {1.0, 2.5, 4.0}) {
                const double base = kernel(xi, spec.pair, t).log_value;
                if (base == -kInf) continue;
                const double by_scale = kernel(xi, cphi, t).log_value - kernel(xi, spec.pair, t / c).log_value;
                const double by_shift = kernel(xi, shifted, t).log_value - kernel(xi, spec.pair, t + a).log_value;
                rec.slack(1e-12 * log_scale(base) - std::fabs(by_scale), [&] { return echo(spec, {{"t", t}, {"c", c}, {"kernel_scaling_gap", by_scale}}); });
                rec.slack(1e-12 * log_scale(base) - std::fabs(by_shift), [&] { return echo(spec, {{"t", t}, {"offset", a}, {"kernel_shift_gap", by_shift}}); });
            }
        }
    }
}

void check_trichotomy(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const ExponentOptions ex = exact_options();
    std::size_t i = 0;
    for (const auto& spec : mixed_instances(check_seed(o, 4), scaled_count(o, 2.0))) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 4), {i++}));
        const WeightPair p = scaled_pair(spec.pair, d.integer(1, 16) / 4.0);
        for (const auto& xi : spec.functionals) {
            const auto g = gamma(xi, p, ex);
            const bool annihilates = ell_I_membership(xi, 1.0, p, ex);
            auto ctx = [&] { return echo_pair(p, {{"functional", to_json(xi)}, {"gamma", to_json(g)}, {"annihilates", annihilates}}); };
            if (annihilates) {
                if (g.kind == ExponentKind::neg_infinity) continue;
                rec.slack(g.is_finite() ? std::min(g.value, 1.0 - g.value) : -kInf, ctx);
            } else {
                rec.slack(g.as_double() - 1.0, ctx);
            }
        }
    }
}

/// A point of P(phi): a random convex combination of the pieces plus a nonnegative vector.
std::vector<double> random_newton_point(Draw& d, const TropicalWeight& phi) {
    const std::size_t n = phi.dimension();
    std::vector<double> theta(phi.pieces().size());
    double total = 0.0;
    for (auto& v : theta) total += v = d.integer(1, 8);
    std::vector<double> mu(n, 0.0);
    for (std::size_t j = 0; j < theta.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) mu[i] += theta[j] / total * phi.pieces()[j][i];
    for (auto& v : mu)
        if (d.coin(0.5)) v += d.eighths(0, 8);
    return mu;
}

void check_newton_lower_bound(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    std::size_t i = 0;
    for (const auto& spec : mixed_instances(check_seed(o, 5), o.instances)) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 5), {i++}));
        const WeightPair p = without_psi(spec.pair);
        const NewtonBody body(p.phi());
        const auto lambda = random_newton_point(d, p.phi());
        const auto cls = newton_membership(body, lambda);
        rec.slack(cls.kind == NewtonClass::outside ? -1.0 : 0.0, [&] { return echo_pair(p, {{"point", lambda}, {"newton_margin", cls.margin}}); });
        for (const auto& xi : spec.functionals) {
            double bound = -kInf;
            for (const auto& [alpha, c] : xi.terms()) {
                double m = kInf;
                for (std::size_t k = 0; k < alpha.dimension(); ++k)
                    if (lambda[k] > 0.0) m = std::min(m, (alpha[k] + 1.0) / lambda[k]);
                bound = std::max(bound, 2.0 * m);
            }
            const double g = gamma(xi, p).as_double();
            rec.slack(g - bound + o.tol * log_scale(bound), [&] {
                return echo_pair(p, {{"point", lambda}, {"functional", to_json(xi)}, {"gamma", g}, {"bound", bound}});
            });
        }
    }
}

void check_interior_membership(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    std::size_t i = 0;
    for (const auto& spec : mixed_instances(check_seed(o, 6), o.instances)) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 6), {i++}));
        const WeightPair p = without_psi(spec.pair);
        const NewtonBody body(p.phi());
        for (int trial = 0; trial < 4; ++trial) {
            const MultiIndex alpha = random_multi_index(d, p.dimension(), 2);
            std::vector<double> shifted(alpha.dimension());
            for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] = alpha[k] + 1.0;
            const auto cls = newton_membership(body, shifted);
            if (cls.kind != NewtonClass::interior) continue;
            const bool member = ideal_membership(alpha, 2.0, p);
            rec.slack(member ? cls.margin : -1.0, [&] { return echo_pair(p, {{"alpha", to_json(alpha)}, {"newton_margin", cls.margin}}); });
        }
    }
}

template <class Valued>
void valuative_ratio(const VerifyOptions& o, CheckResult& r, std::uint64_t tag, Valued&& value) {
    Recorder rec(r);
    for (const auto& spec : generate_instances(check_seed(o, tag), scaled_count(o, 2.0), Profile::valuative)) {
        rec.instance();
        const Valuation nu(*spec.w);
        const WeightPair doubled(spec.pair.phi().scaled(2.0));
        value(spec, nu, doubled, rec);
    }
    // Equality case: one variable, phi = log|z|, nu_1, delta at 0.
    const WeightPair line(TropicalWeight(std::vector<std::vector<double>>{{1.0}}));
    const Valuation unit({1.0});
    const double ratio = kiselman(unit, line.phi()) / (valuation_of_functional(unit, Functional::delta(MultiIndex{0})) + thinness(unit)) *
                         gamma(Functional::delta(MultiIndex{0}), WeightPair(line.phi().scaled(2.0))).value;
    rec.slack(ratio == 1.0 ? 0.0 : -std::fabs(ratio - 1.0), [&] { return Json{{"equality_witness", ratio}}; });
}

void check_valuative_functional(const VerifyOptions& o, CheckResult& r) {
    valuative_ratio(o, r, 7, [&](const InstanceSpec& spec, const Valuation& nu, const WeightPair& doubled, Recorder& rec) {
        for (const auto& xi : spec.functionals) {
            const double g = gamma(xi, doubled).as_double();
            const double ratio = kiselman(nu, spec.pair.phi()) / (valuation_of_functional(nu, xi) + thinness(nu)) * g;
            rec.slack(1.0 + o.tol - ratio, [&] { return echo(spec, {{"functional", to_json(xi)}, {"ratio", ratio}}); });
        }
    });
}

void check_valuative_germ(const VerifyOptions& o, CheckResult& r) {
    valuative_ratio(o, r, 8, [&](const InstanceSpec& spec, const Valuation& nu, const WeightPair& doubled, Recorder& rec) {
        for (const auto& f : spec.germs) {
            const double c = jumping_number(f, doubled).as_double();
            const double ratio = kiselman(nu, spec.pair.phi()) / (valuation_of_germ(nu, f) + thinness(nu)) * c;
            rec.slack(1.0 + o.tol - ratio, [&] { return echo(spec, {{"germ", to_json(f)}, {"ratio", ratio}}); });
        }
    });
}

void check_restriction(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const ExponentOptions ex = exact_options();
    std::size_t i = 0;
    for (const auto& spec : generate_instances(check_seed(o, 9), o.instances, Profile::restrictable)) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 9), {i++}));
        const std::size_t k = *spec.restrict_to;
        const WeightPair restricted = restrict_pair(spec.pair, k);
        for (int trial = 0; trial < 3; ++trial) {
            const Functional xi = random_functional(d, k, 3, 3);
            const auto lhs = gamma(xi, restricted, ex);
            const auto rhs = gamma(lift_functional(xi, spec.dimension()), spec.pair, ex);
            double s;
            if (lhs.is_finite() && rhs.is_finite())
                s = *lhs.exact <= *rhs.exact ? to_double(*rhs.exact - *lhs.exact) : -to_double(*lhs.exact - *rhs.exact);
            else
                s = rhs.as_double() - lhs.as_double();
            if (std::isnan(s)) s = 0.0;  // both infinite with the same sign
            rec.slack(s + o.tol, [&] { return echo(spec, {{"functional", to_json(xi)}, {"restricted", to_json(lhs)}, {"lifted", to_json(rhs)}}); });
        }
    }
}

void check_product(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const ExponentOptions ex = exact_options();
    const auto specs = generate_instances(check_seed(o, 10), o.instances, Profile::productable);
    for (std::size_t i = 0; i + 1 < specs.size(); i += 2) {
        rec.instance();
        const auto& a = specs[i];
        const auto& b = specs[i + 1];
        const WeightPair combined = combine_product(a.pair, b.pair);
        const bool kernels = exact_route(combined) != ExactRoute::none && exact_route(a.pair) != ExactRoute::none &&
                             exact_route(b.pair) != ExactRoute::none;
        auto ctx = [&](Json extra) {
            Json j{{"first", to_json(a)}, {"second", to_json(b)}};
            for (auto& [key, v] : extra.items()) j[key] = v;
            return j;
        };
        for (const auto& x1 : a.functionals)
            for (const auto& x2 : b.functionals) {
                const Functional x = product_functional(x1, x2);
                const auto g1 = gamma(x1, a.pair, ex);
                const auto g2 = gamma(x2, b.pair, ex);
                const auto g = gamma(x, combined, ex);
                ExtendedExponent expected = ExtendedExponent::neg_infinity();
                if (g1.is_finite() && g2.is_finite()) expected = ExtendedExponent::finite(to_double(*g1.exact + *g2.exact), *g1.exact + *g2.exact);
                rec.slack(exponent_equal(g, expected) ? 0.0 : -1.0, [&] {
                    return ctx({{"gamma_first", to_json(g1)}, {"gamma_second", to_json(g2)}, {"gamma_product", to_json(g)}});
                });
                if (!kernels) continue;
                for (double t : {0.0, 1.0, 2.5}) {
                    const double k1 = kernel(x1, a.pair, t).log_value;
                    const double k2 = kernel(x2, b.pair, t).log_value;
                    const double k = kernel(x, combined, t).log_value;
                    double s;
                    if (k1 == -kInf || k2 == -kInf)
                        s = k == -kInf ? 0.0 : -1.0;
                    else
                        s = 1e-12 * log_scale(k) - std::fabs(k - (k1 + k2));
                    rec.slack(s, [&] { return ctx({{"t", t}, {"log_k", k}, {"log_k_first", k1}, {"log_k_second", k2}}); });
                }
            }
    }
}

/// A functional pairing nontrivially with F: one monomial of F plus up to two others.
Functional admissible_functional(Draw& d, const Germ& f) {
    const auto support = f.support();
    for (;;) {
        detail::SparseCoefficients::Map terms;
        terms[support[static_cast<std::size_t>(d.integer(0, static_cast<int>(support.size()) - 1))]] =
            Complex(d.integer(1, 8) / 8.0, d.integer(-8, 8) / 8.0);
        const int extra = d.integer(0, 2);
        for (int e = 0; e < extra; ++e)
            terms[random_multi_index(d, f.dimension(), 3)] = Complex(d.integer(-8, 8) / 8.0, d.integer(1, 8) / 8.0);
        Functional xi(f.dimension(), std::move(terms));
        if (std::abs(pair(xi, f)) > 0.0) return xi;
    }
}

void check_germ_infimum(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    std::size_t i = 0;
    for (const auto& spec : mixed_instances(check_seed(o, 11), o.instances)) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 11), {i++}));
        for (const auto& f : spec.germs) {
            const auto cf = jumping_number(f, spec.pair);
            if (cf.marker != ExponentMarker::none || !(cf.value > 0.0)) continue;
            double worst = kInf;
            for (int trial = 0; trial < 50; ++trial) {
                const Functional xi = admissible_functional(d, f);
                const double g = gamma(xi, spec.pair).as_double();
                worst = std::min(worst, g);
                rec.slack(g - cf.value + o.tol, [&] { return echo(spec, {{"germ", to_json(f)}, {"functional", to_json(xi)}, {"gamma", g}, {"jumping_number", cf.value}}); });
            }
        }
    }
}

void check_computing_functional(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const ExponentOptions ex = exact_options();
    for (const auto& spec : mixed_instances(check_seed(o, 12), o.instances)) {
        rec.instance();
        for (const auto& f : spec.germs) {
            const auto cf = jumping_number(f, spec.pair, ex);
            if (cf.marker != ExponentMarker::none || !(cf.value > 0.0)) continue;
            const Functional eta = computing_functional(f, spec.pair, ex);
            const auto g = gamma(eta, spec.pair, ex);
            const bool ok = std::abs(pair(eta, f)) > 0.0 && exponent_equal(g, cf);
            rec.slack(ok ? 0.0 : -1.0, [&] { return echo(spec, {{"germ", to_json(f)}, {"computing", to_json(eta)}, {"gamma", to_json(g)}, {"jumping_number", to_json(cf)}}); });
        }
    }
}

void check_slope_limit(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    for (const auto& base : generate_instances(check_seed(o, 13), scaled_count(o, 0.3), Profile::product)) {
        rec.instance();
        const WeightPair p = without_psi(base.pair);
        const Functional xi0 = Functional::delta(MultiIndex::zero(p.dimension()));
        const auto est = gamma_numeric(xi0, p, 40.0, 81);
        const double c = cse(p).value;
        const double rel = std::fabs(est.estimate - c) / c;
        rec.slack(0.02 - rel, [&] { return echo_pair(p, {{"secant", est.estimate}, {"cse", c}}); });
        for (std::size_t i = 2; i < est.curve.size(); ++i) {
            const double s1 = est.curve.secant(i - 1);
            const double s2 = est.curve.secant(i);
            rec.slack(s2 - s1 + 1e-12 * log_scale(s1), [&] { return echo_pair(p, {{"t", est.curve.grid[i]}, {"secant_before", s1}, {"secant_after", s2}}); });
        }
        rec.slack(est.upper - est.lower + o.tol * log_scale(c), [&] { return echo_pair(p, {{"lower", est.lower}, {"upper", est.upper}}); });
    }
}

void check_tail_lower_bound(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const std::size_t count = scaled_count(o, 5.0);
    for (std::size_t i = 0; i < count; ++i) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 14), {i}));
        const auto n = static_cast<std::size_t>(d.integer(1, 4));
        std::vector<double> k(n), a(n);
        for (std::size_t j = 0; j < n; ++j) {
            k[j] = 0.5 + 5.5 * d.uniform();
            a[j] = 0.25 + 3.75 * d.uniform();
            // Repeated rates exercise the confluent formula.
            if (j > 0 && d.coin(0.3)) a[j] = a[0] * k[j] / k[0];
        }
        const double s = 10.0 * d.uniform();
        double rate = kInf, log_bound = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            rate = std::min(rate, k[j] / a[j]);
            log_bound -= std::log(k[j]);
        }
        log_bound -= rate * s;
        const double value = log_hypoexp_tail(k, a, s);
        rec.slack(value - log_bound + 1e-12 * log_scale(log_bound), [&] { return Json{{"k", k}, {"a", a}, {"s", s}, {"log_value", value}, {"log_bound", log_bound}}; });
    }
    const std::vector<double> k{1.0, 1.0}, a{1.0, 2.0};
    const double exact = 2.0 * std::exp(-0.5) - std::exp(-1.0);
    const double got = hypoexp_tail(k, a, 1.0);
    rec.slack(1e-12 - std::fabs(got - exact), [&] { return Json{{"reference", exact}, {"value", got}}; });
}

void check_cse_infimum(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    for (const auto& spec : mixed_instances(check_seed(o, 15), o.instances)) {
        rec.instance();
        const WeightPair p = without_psi(spec.pair);
        const std::size_t n = p.dimension();
        const ExponentOptions ex = exact_options();
        const Rational c = *cse(p, ex).exact;
        std::optional<Rational> best;
        MultiIndex arg = MultiIndex::zero(n);
        std::vector<int> e(n, 0);
        for (;;) {
            const MultiIndex alpha(e);
            const Rational g = *gamma(Functional::delta(alpha), p, ex).exact;
            if (!best || g < *best) {
                best = g;
                arg = alpha;
            }
            std::size_t pos = 0;
            while (pos < n && ++e[pos] > 2) e[pos++] = 0;
            if (pos == n) break;
        }
        const bool ok = *best == c && arg == MultiIndex::zero(n);
        rec.slack(ok ? 0.0 : -1.0, [&] { return echo_pair(p, {{"cse", c.str()}, {"window_min", best->str()}, {"argmin", to_json(arg)}}); });
    }
}

void check_max_subadditive(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const std::size_t count = o.instances;
    for (std::size_t i = 0; i < count; ++i) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 16), {i}));
        const auto n = static_cast<std::size_t>(d.integer(1, 3));
        const TropicalWeight u = random_tropical_weight(d, n, static_cast<std::size_t>(d.integer(1, 3)));
        const TropicalWeight v = random_tropical_weight(d, n, static_cast<std::size_t>(d.integer(1, 3)));
        const WeightPair combined = combine_product(WeightPair(u), WeightPair(v));
        const TropicalWeight diagonal = restrict_to_diagonal(combined.phi());
        std::vector<std::vector<double>> joined = u.pieces();
        joined.insert(joined.end(), v.pieces().begin(), v.pieces().end());
        const TropicalWeight direct(std::move(joined));
        const double cu = cse(WeightPair(u)).value;
        const double cv = cse(WeightPair(v)).value;
        const double cm = cse(WeightPair(diagonal)).value;
        auto ctx = [&] { return Json{{"u", to_json(u)}, {"v", to_json(v)}, {"diagonal", to_json(diagonal)}, {"cse_u", cu}, {"cse_v", cv}, {"cse_max", cm}}; };
        rec.slack(diagonal == direct ? 0.0 : -1.0, ctx);
        rec.slack(cu + cv - cm + o.tol, ctx);
    }
}

void check_mc_exact(const VerifyOptions& o, CheckResult& r) {
    Recorder rec(r);
    const std::size_t count = scaled_count(o, 0.3);
    // A 2% relative band is only meaningful once the standard error is well below it.
    const bool relative = o.samples >= 1000000;
    std::size_t i = 0;
    for (const auto& spec : exact_path_instances(check_seed(o, 17), count)) {
        rec.instance();
        Draw d(derive_seed(check_seed(o, 17), {i++}));
        const double t = d.eighths(0, 16);
        const std::uint64_t seed = derive_seed(check_seed(o, 17), {i, 1});
        const Functional& xi = spec.functionals.front();
        const MultiIndex& alpha = xi.terms().begin()->first;
        const MassResult exact = d_alpha(spec.pair, alpha, t);
        const MassResult mc = mc_mass(spec.pair, alpha, t, o.samples, seed);
        auto ctx = [&](Json extra) { return echo(spec, std::move(extra)); };
        if (!exact.finite() || !mc.finite()) {
            rec.slack(exact.status == mc.status ? 0.0 : -1.0, [&] { return ctx({{"alpha", to_json(alpha)}, {"exact_status", to_string(exact.status)}, {"mc_status", to_string(mc.status)}}); });
        } else {
            const double diff = mc.log_value - exact.log_value;
            rec.mc(diff, mc.stderr_log, [&] { return ctx({{"alpha", to_json(alpha)}, {"t", t}, {"exact", exact.log_value}, {"mc", mc.log_value}, {"stderr", mc.stderr_log}}); });
            if (relative) rec.slack(0.02 - std::fabs(std::expm1(diff)), [&] { return ctx({{"alpha", to_json(alpha)}, {"t", t}, {"relative_error", std::expm1(diff)}}); });
        }
        KernelOptions mc_opts;
        mc_opts.mode = MassMode::monte_carlo;
        mc_opts.mc.samples = o.samples;
        mc_opts.mc.seed = seed;
        const KernelValue ke = kernel(xi, spec.pair, t);
        const KernelValue km = kernel(xi, spec.pair, t, mc_opts);
        if (!ke.is_zero() && !km.is_zero()) {
            const double diff = km.log_value - ke.log_value;
            rec.mc(diff, km.stderr_log, [&] { return ctx({{"functional", to_json(xi)}, {"t", t}, {"exact_log_k", ke.log_value}, {"mc_log_k", km.log_value}}); });
            if (relative) rec.slack(0.02 - std::fabs(std::expm1(diff)), [&] { return ctx({{"functional", to_json(xi)}, {"t", t}, {"relative_error", std::expm1(diff)}}); });
        }
        // Orthogonality of monomials: the mass of |F|^2 is the weighted sum of monomial masses.
        const Germ& f = spec.germs.front();
        std::vector<int> low(spec.dimension(), 1 << 20);
        for (const auto& [a, c] : f.terms())
            for (std::size_t k = 0; k < low.size(); ++k) low[k] = std::min(low[k], a[k]);
        bool integrable = psi_integrable(MultiIndex(low), spec.pair);
        for (const auto& [a, c] : f.terms()) integrable = integrable && psi_integrable(a, spec.pair);
        if (!integrable) continue;
        double top = -kInf;
        std::vector<double> logs;
        for (const auto& [a, c] : f.terms()) {
            logs.push_back(std::log(std::norm(c)) + d_alpha(spec.pair, a, t).log_value);
            top = std::max(top, logs.back());
        }
        double sum = 0.0;
        for (double l : logs) sum += std::exp(l - top);
        const double series = top + std::log(sum);
        const MassResult germ_mc = mc_germ_mass(spec.pair, f, t, o.samples, derive_seed(seed, {2}));
        if (germ_mc.finite())
            rec.mc(germ_mc.log_value - series, germ_mc.stderr_log, [&] { return ctx({{"germ", to_json(f)}, {"t", t}, {"series", series}, {"mc", germ_mc.log_value}}); });
    }
}

struct CheckDef {
    const char* key;
    const char* statement;
    void (*run)(const VerifyOptions&, CheckResult&);
};

const std::vector<CheckDef>& registry() {
    static const std::vector<CheckDef> defs{
        {"prop-1.2", "log K(t) is convex in t", check_convexity},
        {"prop-1.3", "t - log K(t) is nondecreasing when xi annihilates I(phi + psi)", check_monotone_gap},
        {"lemma-2.3", "gamma scales as 1/c under phi -> c phi and ignores offsets", check_scaling},
        {"lemma-2.4", "gamma lies in [0, 1] or [1, +inf] according to annihilation of I(phi + psi)", check_trichotomy},
        {"prop-5.2", "gamma(xi, phi) >= 2 max min (a_i + 1) / lambda_i for lambda in the Newton body", check_newton_lower_bound},
        {"cor-5.3", "a + 1 interior to the Newton body puts z^a in I(2 phi)", check_interior_membership},
        {"prop-6.2", "nu(phi) / (nu(xi) + A(nu)) * gamma(xi, 2 phi) <= 1", check_valuative_functional},
        {"cor-6.3", "nu(phi) / (nu(f) + A(nu)) * c^f(2 phi) <= 1", check_valuative_germ},
        {"thm-7.1", "gamma on a coordinate subspace <= gamma of the lifted functional", check_restriction},
        {"thm-7.3", "kernels multiply and gammas add over products", check_product},
        {"thm-1.3", "gamma(xi) >= c^F whenever (xi . F)(o) != 0", check_germ_infimum},
        {"thm-1.5", "the computing functional attains c^F", check_computing_functional},
        {"cor-4.4", "secant slopes of log K for delta_0 approach cse from below", check_slope_limit},
        {"i-lower-bound", "I^k_a(s) >= exp(-min(k_i / a_i) s) / prod k_i", check_tail_lower_bound},
        {"cor-1.6", "cse is the minimum of gamma over deltas, attained at 0", check_cse_infimum},
        {"cor-7.5", "cse(max(u, v)) <= cse(u) + cse(v) through the diagonal", check_max_subadditive},
        {"mc-exact", "Monte Carlo masses and kernels agree with the closed forms", check_mc_exact},
    };
    return defs;
}

CheckResult run_one(const CheckDef& def, const VerifyOptions& opts) {
    CheckResult r;
    r.key = def.key;
    r.statement = def.statement;
    const auto start = std::chrono::steady_clock::now();
    try {
        def.run(opts, r);
    } catch (const std::exception& e) {
        ++r.violations;
        r.counterexamples.push_back(Json{{"error", e.what()}});
    }
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.comparisons == 0) r.min_slack = r.max_slack = 0.0;
    return r;
}

}  // namespace

const std::vector<std::string>& check_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& d : registry()) k.emplace_back(d.key);
        return k;
    }();
    return keys;
}

VerificationReport run_verification(const VerifyOptions& opts) {
    for (const auto& key : opts.only)
        if (std::find(check_keys().begin(), check_keys().end(), key) == check_keys().end())
            throw InvalidArgument("unknown check '" + key + "'");
    std::vector<const CheckDef*> selected;
    for (const auto& d : registry())
        if (opts.only.empty() || opts.only.count(d.key)) selected.push_back(&d);

    VerificationReport report;
    report.options = opts;
    report.checks.resize(selected.size());
    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < selected.size(); ++i) report.checks[i] = run_one(*selected[i], opts);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned t = 0; t < threads; ++t)
            jobs.push_back(std::async(std::launch::async, [&, t] {
                for (std::size_t i = t; i < selected.size(); i += threads) report.checks[i] = run_one(*selected[i], opts);
            }));
        for (auto& j : jobs) j.get();
    }
    return report;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

Json VerificationReport::to_json(bool timing) const {
    Json out;
    out["schema"] = kSchema;
    out["seed"] = options.seed;
    out["instances"] = options.instances;
    out["samples"] = options.samples;
    out["tol"] = options.tol;
    out["passed"] = passed();
    Json list = Json::array();
    for (const auto& c : checks) {
        Json j{{"key", c.key},
               {"statement", c.statement},
               {"passed", c.passed()},
               {"instances", c.instances},
               {"comparisons", c.comparisons},
               {"violations", c.violations},
               {"min_slack", number_or_string(c.min_slack)},
               {"max_slack", number_or_string(c.max_slack)},
               {"mc_comparisons", c.mc_comparisons},
               {"soft_exceedances", c.soft_exceedances},
               {"allowance", c.allowance()},
               {"counterexamples", c.counterexamples}};
        if (timing) j["runtime_s"] = c.runtime_s;
        list.push_back(std::move(j));
    }
    out["checks"] = std::move(list);
    return out;
}

std::string VerificationReport::to_text(bool timing) const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.passed() ? "PASS " : "FAIL ") << c.key << "  instances=" << c.instances << " comparisons=" << c.comparisons
            << " violations=" << c.violations << " min_slack=" << format_double(c.min_slack);
        if (c.mc_comparisons > 0) out << " mc=" << c.mc_comparisons << " soft=" << c.soft_exceedances << "/" << c.allowance();
        if (timing) out << " runtime=" << c.runtime_s << "s";
        out << "\n";
        for (const auto& ce : c.counterexamples) out << "    counterexample: " << ce.dump() << "\n";
    }
    out << (passed() ? "all checks passed" : "verification FAILED") << "\n";
    return out.str();
}

}  // namespace xicse::harness
