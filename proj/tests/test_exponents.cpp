#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "xicse/exponents.hpp"
#include "xicse/polytope.hpp"

using namespace xicse;

namespace {

using Pieces = std::vector<std::vector<double>>;
constexpr double kInf = std::numeric_limits<double>::infinity();

const WeightPair kLine{TropicalWeight(Pieces{{1.0}})};

WeightPair with_psi(double slope) { return WeightPair(TropicalWeight(Pieces{{1.0}}), TropicalWeight(Pieces{{slope}})); }

Germ germ(std::size_t n, std::initializer_list<std::pair<MultiIndex, double>> terms) {
    Germ::Map m;
    for (const auto& [a, c] : terms) m[a] = c;
    return Germ(n, m);
}

Functional functional(std::size_t n, std::initializer_list<std::pair<MultiIndex, double>> terms) {
    Functional::Map m;
    for (const auto& [a, c] : terms) m[a] = c;
    return Functional(n, m);
}

// Integral of |z|^{-p} over the annulus e^{-depth} < |z| < 1, divided by 2 pi.
// In s = -log r the integrand is e^{-(2 - p) s}, so it stays bounded as depth grows iff p < 2.
double radial_mass(double p, double depth) {
    auto f = [p](double s) { return std::exp(-(2.0 - p) * s); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, depth, 15, 1e-12);
}

double dyadic(std::mt19937_64& gen, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen) / 8.0;
}

// Tropical weight with dyadic entries; the last piece is strictly positive so the
// singularity is isolated.
TropicalWeight random_weight(std::mt19937_64& gen, std::size_t n) {
    Pieces pieces(std::uniform_int_distribution<int>(0, 2)(gen));
    for (auto& p : pieces) {
        p.resize(n);
        for (auto& v : p) v = dyadic(gen, 0, 24);
        if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) p[0] = 1.0;
    }
    std::vector<double> positive(n);
    for (auto& v : positive) v = dyadic(gen, 2, 24);
    pieces.push_back(positive);
    return TropicalWeight(pieces);
}

WeightPair random_pair(std::mt19937_64& gen, std::size_t n, bool with_psi_part) {
    auto phi = random_weight(gen, n);
    if (!with_psi_part || std::uniform_int_distribution<int>(0, 2)(gen) == 0) return WeightPair(phi);
    Pieces psi(1 + std::uniform_int_distribution<int>(0, 1)(gen));
    for (auto& p : psi) {
        p.resize(n);
        for (auto& v : p) v = dyadic(gen, 0, 12);
        if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) p[0] = 0.5;
    }
    return WeightPair(phi, TropicalWeight(psi));
}

MultiIndex random_index(std::mt19937_64& gen, std::size_t n, int max_entry = 3) {
    std::vector<int> a(n);
    for (auto& v : a) v = std::uniform_int_distribution<int>(0, max_entry)(gen);
    return MultiIndex(a);
}

Functional random_functional(std::mt19937_64& gen, std::size_t n) {
    Functional::Map m;
    const int terms = std::uniform_int_distribution<int>(1, 3)(gen);
    for (int k = 0; k < terms; ++k) m[random_index(gen, n)] = std::uniform_real_distribution<double>(0.5, 2.0)(gen);
    return Functional(n, m);
}

Germ random_germ(std::mt19937_64& gen, std::size_t n) {
    Germ::Map m;
    const int terms = std::uniform_int_distribution<int>(1, 3)(gen);
    for (int k = 0; k < terms; ++k) m[random_index(gen, n)] = std::uniform_real_distribution<double>(0.5, 2.0)(gen);
    return Germ(n, m);
}

ExponentOptions exact_options() {
    ExponentOptions o;
    o.exact_rational = true;
    return o;
}

}  // namespace

TEST_CASE("monomial jumping number examples") {
    CHECK(monomial_jumping_number({0}, kLine).value == 2.0);
    CHECK(monomial_jumping_number({2, 0}, WeightPair(TropicalWeight::monomial_max({1.0, 1.0}))).value == 8.0);
    const auto half = with_psi(1.0);
    CHECK(monomial_jumping_number({0}, half).value == doctest::Approx(1.0).epsilon(1e-14));
    ExponentOptions bis;
    bis.method = JumpingMethod::bisection;
    CHECK(monomial_jumping_number({0}, half, bis).value == doctest::Approx(1.0).epsilon(1e-9));
    // |z|^{-(c + 1)} is integrable at c = 0.9 and not at c = 1.1.
    CHECK(radial_mass(1.9, 400.0) == doctest::Approx(radial_mass(1.9, 200.0)).epsilon(1e-6));
    CHECK(radial_mass(2.1, 400.0) > 1e8 * radial_mass(2.1, 200.0));
    CHECK(ideal_membership({0}, 0.9, half));
    CHECK_FALSE(ideal_membership({0}, 1.1, half));
}

TEST_CASE("non psi-integrable monomials carry a marker") {
    const auto steep = with_psi(3.0);
    const auto e = monomial_jumping_number({0}, steep);
    CHECK(e.value == 0.0);
    CHECK(e.marker == ExponentMarker::not_psi_integrable);
    CHECK(monomial_jumping_number({1}, steep).marker == ExponentMarker::none);
    CHECK_THROWS_AS(monomial_jumping_number({0, 0}, kLine), DimensionError);
}

TEST_CASE("gamma examples") {
    const std::vector<double> w{0.5, 1.25, 3.0};
    CHECK(gamma(Functional::delta(MultiIndex::zero(3)), WeightPair(TropicalWeight::monomial_max(w))).value ==
          doctest::Approx(2.0 * (0.5 + 1.25 + 3.0)).epsilon(1e-15));
    const auto xi = functional(2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}});
    CHECK(gamma(xi, WeightPair(TropicalWeight::monomial_max({1.0, 2.0}))).value == 8.0);

    // With psi = 3 log|z| the constant is not even psi-integrable: |z|^{-3} has divergent mass.
    CHECK(radial_mass(3.0, 40.0) > 1e12 * radial_mass(3.0, 10.0));
    CHECK(gamma(Functional::delta({0}), with_psi(3.0)).kind == ExponentKind::neg_infinity);
    CHECK(gamma(Functional::zero(1), kLine).kind == ExponentKind::neg_infinity);
    CHECK(gamma(Functional(1, {}, true), kLine).kind == ExponentKind::pos_infinity);
    CHECK(to_string(gamma(Functional(1, {}, true), kLine)) == "+inf");
}

TEST_CASE("jumping number and cse examples") {
    const WeightPair diag(TropicalWeight::monomial_max({1.0, 1.0}));
    CHECK(jumping_number(germ(2, {{{2, 0}, 1.0}, {{0, 3}, 1.0}}), diag).value == 8.0);
    CHECK(jumping_number(Germ::constant(2), diag) == cse(diag));
    CHECK(jumping_number(germ(1, {{{1}, 1.0}}), kLine).value == 4.0);
    CHECK(cse(diag).value == 4.0);
    CHECK(cse(kLine).value == 2.0);
    for (double c : {0.5, 3.0, 7.0})
        CHECK(cse(WeightPair(TropicalWeight(Pieces{{c}}))).value == doctest::Approx(2.0 / c).epsilon(1e-14));
    CHECK_THROWS_AS(jumping_number(Germ(1, {}), kLine), InvalidArgument);
    CHECK(jumping_number(germ(1, {{{0}, 1.0}, {{1}, 1.0}}), with_psi(3.0)).marker == ExponentMarker::not_psi_integrable);
}

TEST_CASE("valuations") {
    const Valuation nu13({1.0, 3.0});
    CHECK(kiselman(Valuation({0.5, 2.0}), TropicalWeight::monomial_max({0.5, 2.0})) == doctest::Approx(1.0));
    CHECK(kiselman(nu13, TropicalWeight(Pieces{{2.0, 0.5}})) == doctest::Approx(3.5));
    CHECK(kiselman(nu13, TropicalWeight(Pieces{{1.0, 1.0}, {2.0, 0.0}})) == 2.0);
    CHECK(valuation_of_germ(nu13, germ(2, {{{2, 1}, 1.0}})) == 5.0);
    CHECK(valuation_of_germ(nu13, Germ::constant(2)) == 0.0);
    CHECK(valuation_of_germ(Valuation({2.0, 1.0}), germ(2, {{{1, 0}, 1.0}, {{0, 2}, 1.0}})) == 2.0);
    CHECK(valuation_of_functional(Valuation({1.0}), Functional::delta({0})) == 0.0);
    CHECK(valuation_of_functional(nu13, functional(2, {{{1, 0}, 1.0}, {{0, 2}, 1.0}})) == 6.0);
    CHECK(valuation_of_functional(nu13, Functional(2, {}, true)) == kInf);
    CHECK(thinness(Valuation({1.0, 1.0})) == 2.0);
    CHECK(thinness(Valuation({2.0, 3.0})) == 5.0);
    CHECK(thinness(Valuation({1.0})) == 1.0);
    CHECK_THROWS_AS(Valuation({1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(Valuation({}), InvalidArgument);
}

TEST_CASE("ell_I membership examples") {
    CHECK(ell_I_membership(Functional::delta({0}), 2.0, kLine));
    CHECK_FALSE(ell_I_membership(Functional::delta({0}), 1.0, kLine));
    CHECK_FALSE(ell_I_membership(Functional::zero(1), 1.0, kLine));
    CHECK_THROWS_AS(ell_I_membership(Functional(1, {}, true), 1.0, kLine), UndefinedForInfiniteTail);
}

TEST_CASE("computing functional examples") {
    const WeightPair diag(TropicalWeight::monomial_max({1.0, 1.0}));
    const auto f = germ(2, {{{2, 0}, 1.0}, {{0, 3}, 1.0}});
    const auto xi = computing_functional(f, diag);
    CHECK(xi == Functional::delta({2, 0}));
    CHECK(gamma(xi, diag).value == 8.0);
    CHECK(computing_functional(Germ::constant(2), diag) == Functional::delta({0, 0}));
    const auto z = computing_functional(germ(1, {{{1}, 1.0}}), kLine);
    CHECK(z == Functional::delta({1}));
    CHECK(gamma(z, kLine).value == 4.0);
    // Ties go to the lexicographically first monomial.
    CHECK(computing_functional(germ(2, {{{0, 1}, 1.0}, {{1, 0}, 1.0}}), diag) == Functional::delta({0, 1}));
    CHECK_THROWS_AS(computing_functional(Germ::constant(1), with_psi(3.0)), NotAvailable);
}

TEST_CASE("gamma from kernel slopes") {
    const auto line = gamma_numeric(Functional::delta({0}), kLine, 5.0, 11);
    for (std::size_t i = 1; i < line.curve.size(); ++i) CHECK(std::fabs(line.curve.secant(i) - 2.0) <= 1e-12);
    CHECK(line.upper == 2.0);

    const WeightPair prod(TropicalWeight::monomial_max({1.0, 2.0}));
    const auto est = gamma_numeric(Functional::delta({0, 0}), prod, 40.0, 41);
    CHECK(est.exact->value == 6.0);
    CHECK(std::fabs(est.estimate - 6.0) <= 0.02 * 6.0);
    CHECK(est.lower <= est.upper);
    for (std::size_t i = 2; i < est.curve.size(); ++i)
        CHECK(est.curve.secant(i) >= est.curve.secant(i - 1) - 1e-12);

    CHECK_THROWS_AS(gamma_numeric(Functional::delta({0}), kLine, 5.0, 1), InvalidArgument);
    CHECK_THROWS_AS(gamma_numeric(Functional::delta({0}), kLine, 0.0, 5), InvalidArgument);
}

TEST_CASE("sampled kernel slopes bracket the exact exponent") {
    const WeightPair pair(TropicalWeight(Pieces{{1.0, 0.5}, {0.5, 1.0}}));
    const auto xi = Functional::delta({0, 0});
    const double exact = gamma(xi, pair).value;
    CHECK(exact == doctest::Approx(8.0 / 3.0));
    int contained = 0;
    const int trials = 20;
    for (int seed = 0; seed < trials; ++seed) {
        KernelOptions k;
        k.mode = MassMode::monte_carlo;
        k.mc.samples = 50000;
        k.mc.seed = 1000 + seed;
        const auto est = gamma_numeric(xi, pair, 20.0, 5, k);
        CHECK(est.curve.method.back() == MassMethod::monte_carlo);
        if (est.lower <= exact && exact <= est.upper) ++contained;
    }
    CHECK(contained >= 19);
}

TEST_CASE("bisection, LP and closed form agree") {
    std::mt19937_64 gen(41);
    ExponentOptions bis;
    bis.method = JumpingMethod::bisection;
    ExponentOptions lp;
    lp.method = JumpingMethod::lp;
    ExponentOptions closed;
    closed.method = JumpingMethod::closed_form;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto alpha = random_index(gen, n);
        const auto pair = random_pair(gen, n, true);
        const auto a = monomial_jumping_number(alpha, pair, lp);
        const auto b = monomial_jumping_number(alpha, pair, bis);
        CHECK(a.marker == b.marker);
        if (a.marker != ExponentMarker::none) continue;
        CHECK(std::fabs(a.value - b.value) <= 1e-8 * std::max(1.0, a.value));
        const auto e = monomial_jumping_number(alpha, pair, exact_options());
        REQUIRE(e.exact.has_value());
        CHECK(std::fabs(to_double(*e.exact) - a.value) <= 1e-9 * std::max(1.0, a.value));
    }
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 4;
        std::vector<double> w(n);
        std::vector<int> a(n);
        double oracle = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = std::uniform_real_distribution<double>(0.2, 5.0)(gen);
            a[i] = std::uniform_int_distribution<int>(0, 3)(gen);
            oracle += 2.0 * (a[i] + 1) * w[i];
        }
        const WeightPair pair(TropicalWeight::monomial_max(w));
        CHECK(monomial_jumping_number(MultiIndex(a), pair, closed).value == doctest::Approx(oracle).epsilon(1e-14));
        CHECK(monomial_jumping_number(MultiIndex(a), pair, bis).value == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK_THROWS_AS(monomial_jumping_number({0, 0}, WeightPair(TropicalWeight(Pieces{{1.0, 1.0}})), closed),
                    NotAvailable);
}

TEST_CASE("scaling and translation of the weight") {
    std::mt19937_64 gen(43);
    const auto opts = exact_options();
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto pair = random_pair(gen, n, true);
        const auto xi = random_functional(gen, n);
        const auto base = gamma(xi, pair, opts);
        const double c = dyadic(gen, 1, 40);
        const WeightPair scaled(pair.phi().scaled(c), pair.psi());
        const WeightPair moved(pair.phi().with_offset(dyadic(gen, -40, 40)), pair.psi());
        const auto s = gamma(xi, scaled, opts);
        const auto m = gamma(xi, moved, opts);
        CHECK(s.kind == base.kind);
        CHECK(m == base);
        if (base.is_finite()) CHECK(*s.exact * to_rational(c) == *base.exact);
    }
}

TEST_CASE("range trichotomy") {
    std::mt19937_64 gen(47);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto pair = random_pair(gen, n, true);
        const auto xi = random_functional(gen, n);
        const auto g = gamma(xi, pair);
        if (g.kind == ExponentKind::neg_infinity) continue;
        if (ell_I_membership(xi, 1.0, pair)) {
            CHECK(g.value >= 0.0);
            CHECK(g.value <= 1.0 + 1e-12);
        } else {
            CHECK(g.as_double() >= 1.0 - 1e-12);
        }
    }
}

TEST_CASE("newton body bounds") {
    std::mt19937_64 gen(53);
    int interior = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const WeightPair pair(random_weight(gen, n));
        const NewtonBody body(pair.phi());
        const auto xi = random_functional(gen, n);

        std::vector<double> lambda(n);
        for (auto& v : lambda) v = std::uniform_real_distribution<double>(0.0, 6.0)(gen);
        if (newton_membership(body, lambda).kind != NewtonClass::outside) {
            double bound = 0.0;
            for (const auto& [alpha, c] : xi.terms()) {
                double m = kInf;
                for (std::size_t i = 0; i < n; ++i) m = std::min(m, (alpha[i] + 1.0) / lambda[i]);
                bound = std::max(bound, m);
            }
            CHECK(gamma(xi, pair).value >= 2.0 * bound - 1e-9);
        }

        const auto alpha = random_index(gen, n);
        std::vector<double> shifted(n);
        for (std::size_t i = 0; i < n; ++i) shifted[i] = alpha[i] + 1.0;
        if (newton_membership(body, shifted).kind == NewtonClass::interior) {
            ++interior;
            CHECK(ideal_membership(alpha, 2.0, pair));
        }
    }
    CHECK(interior > 10);
}

TEST_CASE("valuative bounds") {
    std::mt19937_64 gen(59);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto phi = random_weight(gen, n);
        const WeightPair doubled(phi.scaled(2.0));
        std::vector<double> w(n);
        for (auto& v : w) v = std::uniform_real_distribution<double>(0.1, 4.0)(gen);
        const Valuation nu(w);
        const auto xi = random_functional(gen, n);
        const auto f = random_germ(gen, n);
        const double a = kiselman(nu, phi);
        CHECK(a / (valuation_of_functional(nu, xi) + thinness(nu)) * gamma(xi, doubled).value <= 1.0 + 1e-9);
        CHECK(a / (valuation_of_germ(nu, f) + thinness(nu)) * jumping_number(f, doubled).value <= 1.0 + 1e-9);
    }
    const Valuation one({1.0});
    const WeightPair doubled(TropicalWeight(Pieces{{2.0}}));
    const auto xi = Functional::delta({0});
    CHECK(kiselman(one, kLine.phi()) / (valuation_of_functional(one, xi) + thinness(one)) * gamma(xi, doubled).value ==
          1.0);
}

TEST_CASE("functionals never beat the jumping number and one attains it") {
    std::mt19937_64 gen(61);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto weights = random_pair(gen, n, true);
        const auto f = random_germ(gen, n);
        const auto target = jumping_number(f, weights, exact_options());
        if (target.marker != ExponentMarker::none) continue;
        int admissible = 0;
        while (admissible < 50) {
            auto xi = random_functional(gen, n);
            if (std::abs(pair(xi, f)) < 1e-12) {
                // Force a common support point.
                const auto& [alpha, c] = *f.terms().begin();
                xi = linear_combination(1.0, xi, 1.0, Functional::delta(alpha));
                if (std::abs(pair(xi, f)) < 1e-12) continue;
            }
            ++admissible;
            CHECK(gamma(xi, weights).as_double() >= target.value - 1e-9);
        }
        if (!(target.value > 0.0)) continue;
        const auto best = computing_functional(f, weights, exact_options());
        CHECK(std::abs(pair(best, f)) > 0.0);
        CHECK(*gamma(best, weights, exact_options()).exact == *target.exact);
    }
}

TEST_CASE("cse is the smallest exponent of a delta functional") {
    std::mt19937_64 gen(67);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto pair = random_pair(gen, n, false);
        const auto opts = exact_options();
        const Rational c = *cse(pair, opts).exact;
        Rational smallest = *gamma(Functional::delta(MultiIndex::zero(n)), pair, opts).exact;
        for (int k = 0; k < 40; ++k)
            smallest = std::min(smallest, *gamma(Functional::delta(random_index(gen, n)), pair, opts).exact);
        CHECK(smallest == c);
    }
}

TEST_CASE("restriction to a coordinate subspace") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const std::size_t k = 1 + trial % (n - 1);
        auto pieces = random_weight(gen, n).pieces();
        std::vector<double> surviving(n, 0.0);
        for (std::size_t i = 0; i < k; ++i) surviving[i] = dyadic(gen, 2, 24);
        pieces.push_back(surviving);
        const WeightPair pair{TropicalWeight(pieces)};
        const auto restricted = restrict_pair(pair, k);
        const auto xi = random_functional(gen, k);
        CHECK(gamma(xi, restricted).as_double() <= gamma(lift_functional(xi, n), pair).as_double() + 1e-9);
    }
}

TEST_CASE("exponents add over products") {
    std::mt19937_64 gen(73);
    const auto opts = exact_options();
    for (int trial = 0; trial < 100; ++trial) {
        const auto p1 = random_pair(gen, 1 + trial % 2, true);
        const auto p2 = random_pair(gen, 1 + (trial / 2) % 2, true);
        const auto x1 = random_functional(gen, p1.dimension());
        const auto x2 = random_functional(gen, p2.dimension());
        const auto g1 = gamma(x1, p1, opts);
        const auto g2 = gamma(x2, p2, opts);
        const auto g = gamma(product_functional(x1, x2), combine_product(p1, p2), opts);
        if (!g1.is_finite() || !g2.is_finite()) {
            CHECK(g.kind == ExponentKind::neg_infinity);
            continue;
        }
        REQUIRE(g.is_finite());
        CHECK(*g.exact == *g1.exact + *g2.exact);
    }
}

TEST_CASE("cse of a max on the diagonal is subadditive") {
    std::mt19937_64 gen(79);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const WeightPair p1(random_weight(gen, n));
        const WeightPair p2(random_weight(gen, n));
        const WeightPair diagonal(restrict_to_diagonal(combine_product(p1, p2).phi()));
        CHECK(cse(diagonal).value <= cse(p1).value + cse(p2).value + 1e-9);
    }
}
