#include "xicse/kernels.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "xicse/rng.hpp"

namespace xicse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t term_seed(std::uint64_t root, const MultiIndex& alpha, double t) {
    std::uint64_t s = derive_seed(root, {std::bit_cast<std::uint64_t>(t)});
    for (int a : alpha.entries()) s = derive_seed(s, {static_cast<std::uint64_t>(a)});
    return s;
}

MassMethod planned_method(const WeightPair& pair, MassMode mode) {
    if (mode == MassMode::monte_carlo) return MassMethod::monte_carlo;
    switch (exact_route(pair)) {
        case ExactRoute::product: return MassMethod::exact_product;
        case ExactRoute::hypoexp: return MassMethod::exact_hypoexp;
        case ExactRoute::none: break;
    }
    if (mode == MassMode::exact) throw NotAvailable("no closed form for this weight pair");
    return MassMethod::monte_carlo;
}

struct Term {
    MultiIndex alpha;
    Complex coefficient;
    MassResult mass;
};

std::vector<Term> series_terms(const Functional& xi, const WeightPair& pair, double t, const KernelOptions& opts) {
    if (xi.infinite_tail()) throw UndefinedForInfiniteTail("the kernel series needs a finitely supported functional");
    if (xi.dimension() != pair.dimension()) throw DimensionError("functional and weights differ in dimension");
    if (!(t >= 0.0)) throw InvalidArgument("kernel needs t >= 0");
    std::vector<Term> terms;
    for (const auto& [alpha, c] : xi.terms()) {
        McOptions mc = opts.mc;
        mc.seed = term_seed(opts.mc.seed, alpha, t);
        MassResult m = d_alpha(pair, alpha, t, opts.mode, mc);
        if (m.status == MassStatus::divergent) continue;
        if (m.status == MassStatus::indeterminate)
            throw NumericFailure("Monte Carlo never reached the sublevel set; raise --samples");
        terms.push_back({alpha, c, m});
    }
    return terms;
}

KernelValue sum_series(const std::vector<Term>& terms, MassMethod method) {
    KernelValue k;
    k.method = method;
    k.terms = terms.size();
    if (terms.empty()) {
        k.log_value = -kInf;
        return k;
    }
    std::vector<double> logs;
    double top = -kInf;
    for (const auto& term : terms) {
        logs.push_back(std::log(std::norm(term.coefficient)) - term.mass.log_value);
        top = std::max(top, logs.back());
    }
    long double sum = 0.0L;
    long double var = 0.0L;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const long double share = std::exp(static_cast<long double>(logs[i] - top));
        sum += share;
        // A relative error s in d_a is a relative error s in its term.
        const long double spread = share * terms[i].mass.stderr_log;
        var += spread * spread;
    }
    k.log_value = top + static_cast<double>(std::log(sum));
    k.stderr_log = static_cast<double>(std::sqrt(var) / sum);
    return k;
}

}  // namespace

KernelValue kernel(const Functional& xi, const WeightPair& pair, double t, const KernelOptions& opts) {
    const MassMethod method = planned_method(pair, opts.mode);
    return sum_series(series_terms(xi, pair, t, opts), method);
}

ExtremalGerm extremal_function(const Functional& xi, const WeightPair& pair, double t) {
    KernelOptions opts;
    opts.mode = MassMode::exact;
    const MassMethod method = planned_method(pair, opts.mode);
    const auto terms = series_terms(xi, pair, t, opts);
    const KernelValue k = sum_series(terms, method);
    if (k.is_zero()) throw NotAvailable("K = 0: no germ with finite norm pairs to 1");
    Germ::Map coeffs;
    for (const auto& term : terms)
        coeffs[term.alpha] = std::conj(term.coefficient) * std::exp(-term.mass.log_value - k.log_value);
    return {Germ(pair.dimension(), std::move(coeffs)), k};
}

double KernelCurve::secant(std::size_t i) const {
    if (i == 0 || i >= size()) return kNaN;
    const double rise = log_k[i] - log_k[i - 1];
    if (std::isnan(rise)) return kNaN;
    return rise / (grid[i] - grid[i - 1]);
}

double KernelCurve::second_difference(std::size_t i) const {
    if (i == 0 || i + 1 >= size()) return kNaN;
    return secant(i + 1) - secant(i);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string KernelCurve::to_csv() const {
    std::ostringstream out;
    out << "t,log_K,K,secant_slope,second_difference,method,stderr\n";
    for (std::size_t i = 0; i < size(); ++i) {
        out << format_double(grid[i]) << ',' << format_double(log_k[i]) << ',' << format_double(std::exp(log_k[i]))
            << ',' << format_double(secant(i)) << ',' << format_double(second_difference(i)) << ','
            << to_string(method[i]) << ',' << format_double(stderr_log[i]) << '\n';
    }
    return out.str();
}

std::vector<double> linear_grid(double t0, double t1, std::size_t steps) {
    if (!(t0 >= 0.0) || !std::isfinite(t1)) throw InvalidArgument("grid needs 0 <= t0 and finite t1");
    if (steps == 1) {
        if (t0 != t1) throw InvalidArgument("a one-point grid needs t0 == t1");
        return {t0};
    }
    if (steps < 2 || !(t1 > t0)) throw InvalidArgument("grid needs t1 > t0 and at least two steps");
    std::vector<double> grid(steps);
    const double span = t1 - t0;
    for (std::size_t i = 0; i < steps; ++i)
        grid[i] = t0 + span * static_cast<double>(i) / static_cast<double>(steps - 1);
    grid.back() = t1;
    return grid;
}

std::vector<double> parse_grid(const std::string& text) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
        throw InvalidArgument("grid must look like t0:t1:steps");
    auto number = [&](std::size_t from, std::size_t to) {
        const std::string part = text.substr(from, to - from);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty())
            throw InvalidArgument("grid field '" + part + "' is not a number");
        return v;
    };
    const double t0 = number(0, first);
    const double t1 = number(first + 1, second);
    const double steps = number(second + 1, text.size());
    if (!(steps >= 1.0) || steps != std::floor(steps) || steps > 1e6)
        throw InvalidArgument("grid steps must be a positive integer");
    return linear_grid(t0, t1, static_cast<std::size_t>(steps));
}

KernelCurve kernel_curve(const Functional& xi, const WeightPair& pair, const std::vector<double>& grid,
                         const KernelOptions& opts) {
    if (grid.empty()) throw InvalidArgument("empty t grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InvalidArgument("t grid must be strictly increasing");
    KernelCurve curve;
    for (double t : grid) {
        const KernelValue k = kernel(xi, pair, t, opts);
        curve.grid.push_back(t);
        curve.log_k.push_back(k.log_value);
        curve.method.push_back(k.method);
        curve.stderr_log.push_back(k.stderr_log);
    }
    return curve;
}

}  // namespace xicse
