#include "xicse/polytope.hpp"

#include <cmath>

namespace xicse {

NewtonBody::NewtonBody(std::vector<std::vector<double>> gens) : generators(std::move(gens)) {
    if (generators.empty()) throw InvalidArgument("Newton body needs at least one generator");
    for (const auto& g : generators)
        if (g.size() != generators.front().size()) throw DimensionError("Newton body generators differ in dimension");
}

namespace {

std::vector<LinearForm> newton_forms(const NewtonBody& body, std::span<const double> mu, double shift) {
    std::vector<LinearForm> forms;
    for (const auto& g : body.generators) {
        LinearForm f;
        f.gradient.resize(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) f.gradient[i] = mu[i] - shift - g[i];
        forms.push_back(std::move(f));
    }
    return forms;
}

double decide_value(std::span<const LinearForm> forms, std::size_t n, bool exact) {
    return exact ? to_double(min_of_max_on_simplex_exact(forms, n).value) : min_of_max_on_simplex(forms, n).value;
}

}  // namespace

NewtonMembership newton_membership(const NewtonBody& body, std::span<const double> mu, const LpOptions& opts) {
    if (mu.size() != body.dimension()) throw DimensionError("slope vector dimension does not match Newton body");
    const std::size_t n = mu.size();
    NewtonMembership out;
    if (opts.exact_rational) {
        auto forms = newton_forms(body, mu, 0.0);
        const Rational d = min_of_max_on_simplex_exact(forms, n).value;
        out.margin = to_double(d);
        out.kind = d > 0 ? NewtonClass::interior : (d < 0 ? NewtonClass::outside : NewtonClass::boundary);
        return out;
    }
    out.margin = decide_value(newton_forms(body, mu, 0.0), n, false);
    if (out.margin < -opts.tol) {
        out.kind = NewtonClass::outside;
    } else if (out.margin <= opts.tol) {
        out.kind = NewtonClass::boundary;
    } else {
        // mu - eps*1 must still lie in P; on the simplex the shift lowers the value by exactly eps.
        const double eps = 0.5 * out.margin;
        const double shifted = decide_value(newton_forms(body, mu, eps), n, false);
        out.kind = shifted > 0.0 ? NewtonClass::interior : NewtonClass::boundary;
    }
    return out;
}

std::vector<LinearForm> ideal_forms(const MultiIndex& alpha, double c, const WeightPair& pair) {
    const std::size_t n = pair.dimension();
    if (alpha.dimension() != n) throw DimensionError("multi-index dimension does not match the weights");
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("ideal membership needs c >= 0");
    const std::vector<double> zero(n, 0.0);
    std::vector<std::span<const double>> psi;
    for (const auto& p : pair.psi_pieces()) psi.emplace_back(p);
    if (psi.empty()) psi.emplace_back(zero);
    std::vector<LinearForm> forms;
    for (const auto& lam : pair.phi().pieces()) {
        for (auto mu : psi) {
            LinearForm f;
            f.gradient.resize(n);
            for (std::size_t i = 0; i < n; ++i) f.gradient[i] = 2.0 * alpha[i] + 2.0 - c * lam[i] - mu[i];
            forms.push_back(std::move(f));
        }
        if (c == 0.0) break;  // phi does not enter h_0
    }
    return forms;
}

namespace {

// Exact h_c value: the double gradients above may round c*lambda. The LP
// variable is u = max_k <g_k, x> + shift >= 0.
Rational exact_ideal_value(const MultiIndex& alpha, double c, const WeightPair& pair) {
    const std::size_t n = pair.dimension();
    const Rational cr = to_rational(c);
    std::vector<std::vector<Rational>> grads;
    std::vector<std::vector<double>> psi(pair.psi_pieces().begin(), pair.psi_pieces().end());
    if (psi.empty()) psi.emplace_back(n, 0.0);
    for (const auto& lam : pair.phi().pieces())
        for (const auto& mu : psi) {
            std::vector<Rational> g(n);
            for (std::size_t i = 0; i < n; ++i)
                g[i] = Rational(2 * alpha[i] + 2) - cr * to_rational(lam[i]) - to_rational(mu[i]);
            grads.push_back(std::move(g));
        }
    Rational shift = 0;
    for (const auto& g : grads)
        for (const auto& v : g) shift = std::max(shift, Rational(abs(v)));
    DenseSimplex<Rational> lp(n + 1);
    std::vector<Rational> cost(n + 1);
    cost[n] = 1;
    lp.set_cost(cost);
    for (auto& g : grads) {
        g.push_back(Rational(-1));
        lp.add_row(std::move(g), RowSense::le, Rational(-shift));
    }
    std::vector<Rational> ones(n + 1, Rational(1));
    ones[n] = 0;
    lp.add_row(std::move(ones), RowSense::eq, Rational(1));
    auto sol = lp.solve();
    if (sol.status != LpStatus::optimal) throw NumericFailure("exact membership LP failed");
    return sol.objective - shift;
}

}  // namespace

bool ideal_membership(const MultiIndex& alpha, double c, const WeightPair& pair, const LpOptions& opts) {
    if (!(c >= 0.0)) throw InvalidArgument("ideal membership needs c >= 0");
    if (opts.exact_rational) return exact_ideal_value(alpha, c, pair) > 0;
    auto forms = ideal_forms(alpha, c, pair);
    const double value = min_of_max_on_simplex(forms, pair.dimension()).value;
    if (std::fabs(value) <= 1e-9) return exact_ideal_value(alpha, c, pair) > 0;
    return value > 0.0;
}

bool psi_integrable(const MultiIndex& alpha, const WeightPair& pair, const LpOptions& opts) {
    return ideal_membership(alpha, 0.0, pair, opts);
}

namespace {

template <class Scalar>
Scalar as_scalar(double v) {
    if constexpr (std::is_same_v<Scalar, double>)
        return v;
    else
        return to_rational(v);
}

template <class Scalar>
ThresholdLpResult<Scalar> solve_threshold(std::span<const std::vector<Scalar>> objective,
                                          std::span<const std::vector<double>> constraints) {
    if (objective.empty() || constraints.empty()) throw InvalidArgument("threshold LP needs forms and constraints");
    const std::size_t n = constraints.front().size();
    DenseSimplex<Scalar> lp(n + 1);
    std::vector<Scalar> cost(n + 1, Scalar(0));
    cost[n] = 1;
    lp.set_cost(cost);
    for (const auto& a : objective) {
        if (a.size() != n) throw DimensionError("threshold LP form has the wrong dimension");
        std::vector<Scalar> row(n + 1);
        for (std::size_t i = 0; i < n; ++i) row[i] = a[i];
        row[n] = -1;
        lp.add_row(std::move(row), RowSense::le, Scalar(0));
    }
    for (const auto& lam : constraints) {
        if (lam.size() != n) throw DimensionError("threshold LP constraint has the wrong dimension");
        std::vector<Scalar> row(n + 1);
        for (std::size_t i = 0; i < n; ++i) row[i] = as_scalar<Scalar>(lam[i]);
        row[n] = 0;
        lp.add_row(std::move(row), RowSense::ge, Scalar(1));
    }
    auto sol = lp.solve();
    if (sol.status != LpStatus::optimal) throw NumericFailure("threshold LP did not reach an optimum");
    ThresholdLpResult<Scalar> out;
    out.value = sol.objective;
    out.argmin.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

}  // namespace

ThresholdLpResult<double> threshold_lp(std::span<const std::vector<double>> objective_forms,
                                       std::span<const std::vector<double>> constraint_pieces) {
    return solve_threshold<double>(objective_forms, constraint_pieces);
}

ThresholdLpResult<Rational> threshold_lp_exact(std::span<const std::vector<Rational>> objective_forms,
                                               std::span<const std::vector<double>> constraint_pieces) {
    return solve_threshold<Rational>(objective_forms, constraint_pieces);
}

std::vector<std::vector<Rational>> jumping_objective_exact(const MultiIndex& alpha, const WeightPair& pair) {
    const std::size_t n = pair.dimension();
    if (alpha.dimension() != n) throw DimensionError("multi-index dimension does not match the weights");
    std::vector<std::vector<Rational>> forms;
    std::vector<std::vector<double>> psi(pair.psi_pieces().begin(), pair.psi_pieces().end());
    if (psi.empty()) psi.emplace_back(n, 0.0);
    for (const auto& mu : psi) {
        std::vector<Rational> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = Rational(2 * alpha[i] + 2) - to_rational(mu[i]);
        forms.push_back(std::move(f));
    }
    return forms;
}

std::vector<std::vector<double>> jumping_objective(const MultiIndex& alpha, const WeightPair& pair) {
    const std::size_t n = pair.dimension();
    if (alpha.dimension() != n) throw DimensionError("multi-index dimension does not match the weights");
    std::vector<std::vector<double>> forms;
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) base[i] = 2.0 * alpha[i] + 2.0;
    if (pair.psi_is_zero()) {
        forms.push_back(base);
        return forms;
    }
    for (const auto& mu : pair.psi_pieces()) {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = base[i] - mu[i];
        forms.push_back(std::move(f));
    }
    return forms;
}

}  // namespace xicse
