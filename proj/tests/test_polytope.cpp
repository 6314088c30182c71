#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "xicse/polytope.hpp"

using namespace xicse;

namespace {

using Pieces = std::vector<std::vector<double>>;

double max_forms(const std::vector<LinearForm>& forms, const std::vector<double>& x) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& f : forms) m = std::max(m, f(x));
    return m;
}

// Minimum of max_j f_j over a regular grid on the simplex (n <= 3).
double grid_minimum(const std::vector<LinearForm>& forms, std::size_t n, int steps) {
    double best = std::numeric_limits<double>::infinity();
    if (n == 1) return max_forms(forms, {1.0});
    for (int i = 0; i <= steps; ++i) {
        if (n == 2) {
            best = std::min(best, max_forms(forms, {double(i) / steps, double(steps - i) / steps}));
            continue;
        }
        for (int j = 0; i + j <= steps; ++j)
            best = std::min(best, max_forms(forms, {double(i) / steps, double(j) / steps, double(steps - i - j) / steps}));
    }
    return best;
}

LinearForm form(std::vector<double> g) { return LinearForm{std::move(g), 0.0}; }

}  // namespace

TEST_CASE("dense simplex statuses") {
    DenseSimplex<double> lp(2);
    lp.set_cost({-1.0, -1.0});
    lp.add_row({1.0, 2.0}, RowSense::le, 4.0);
    lp.add_row({3.0, 1.0}, RowSense::le, 6.0);
    const auto sol = lp.solve();
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(-2.8));

    DenseSimplex<double> open(1);
    open.set_cost({-1.0});
    open.add_row({1.0}, RowSense::ge, 1.0);
    CHECK(open.solve().status == LpStatus::unbounded);

    DenseSimplex<Rational> bad(1);
    bad.set_cost({Rational(1)});
    bad.add_row({Rational(1)}, RowSense::le, Rational(1));
    bad.add_row({Rational(1)}, RowSense::ge, Rational(2));
    CHECK(bad.solve().status == LpStatus::infeasible);
}

TEST_CASE("exact LP returns rationals") {
    DenseSimplex<Rational> lp(2);
    lp.set_cost({Rational(1), Rational(1)});
    lp.add_row({Rational(3), Rational(1)}, RowSense::ge, Rational(1));
    lp.add_row({Rational(1), Rational(3)}, RowSense::ge, Rational(1));
    const auto sol = lp.solve();
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == Rational(1, 2));
}

TEST_CASE("min_of_max_on_simplex examples") {
    {
        const std::vector<LinearForm> f{form({1.0, 2.0})};
        const auto r = min_of_max_on_simplex(f, 2);
        CHECK(r.value == doctest::Approx(1.0));
        CHECK(r.argmin[0] == doctest::Approx(1.0));
    }
    {
        const std::vector<LinearForm> f{form({1.0, 0.0}), form({0.0, 1.0})};
        const auto r = min_of_max_on_simplex(f, 2);
        CHECK(r.value == doctest::Approx(0.5));
        CHECK(r.argmin[0] == doctest::Approx(0.5));
        CHECK(r.active.size() == 2);
        CHECK(min_of_max_on_simplex_exact(f, 2).value == Rational(1, 2));
    }
    {
        const std::vector<LinearForm> f{form({2.0})};
        CHECK(min_of_max_on_simplex(f, 1).value == doctest::Approx(2.0));
    }
}

TEST_CASE("min_of_max_on_simplex against a grid and random points") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::exponential_distribution<double> ex(1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + trial % 2;
        std::vector<LinearForm> forms(1 + trial % 4);
        for (auto& f : forms) {
            f.gradient.resize(n);
            for (auto& g : f.gradient) g = u(gen);
        }
        const auto r = min_of_max_on_simplex(forms, n);
        double sum = 0.0;
        for (double v : r.argmin) {
            CHECK(v >= -1e-12);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(max_forms(forms, r.argmin) - r.value) <= 1e-12);
        // A grid of spacing h can miss the minimum by at most h * max |gradient entry| * 2.
        const int steps = n == 2 ? 1000 : 400;
        const double grid = grid_minimum(forms, n, steps);
        CHECK(grid >= r.value - 1e-12);
        CHECK(grid - r.value <= 1e-6 + 4.0 / steps);
        for (int k = 0; k < 1000 / 30; ++k) {
            std::vector<double> x(n);
            double s = 0.0;
            for (auto& v : x) s += (v = ex(gen));
            for (auto& v : x) v /= s;
            CHECK(r.value <= max_forms(forms, x) + 1e-12);
        }
    }
}

TEST_CASE("fine grid oracle in three dimensions") {
    const std::vector<LinearForm> forms{form({1.0, 0.2, -0.3}), form({-0.5, 0.7, 0.1}), form({0.0, -0.4, 0.9})};
    const double lp = min_of_max_on_simplex(forms, 3).value;
    CHECK(std::fabs(grid_minimum(forms, 3, 1000) - lp) <= 1e-6 + 2e-3);
    CHECK(grid_minimum(forms, 3, 1000) >= lp - 1e-12);
}

TEST_CASE("newton membership examples") {
    const NewtonBody body(TropicalWeight::monomial_max({1.0, 1.0}));
    CHECK(newton_membership(body, std::vector<double>{1.0, 1.0}).kind == NewtonClass::interior);
    CHECK(newton_membership(body, std::vector<double>{0.5, 0.5}).kind == NewtonClass::boundary);
    CHECK(newton_membership(body, std::vector<double>{0.4, 0.4}).kind == NewtonClass::outside);
    LpOptions exact;
    exact.exact_rational = true;
    CHECK(newton_membership(body, std::vector<double>{0.5, 0.5}, exact).kind == NewtonClass::boundary);
    // On the orthant face: mu - eps*1 leaves the orthant, so not interior.
    CHECK(newton_membership(body, std::vector<double>{2.0, 0.0}).kind == NewtonClass::boundary);
    CHECK_THROWS_AS(newton_membership(body, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("newton membership is monotone") {
    const NewtonBody body(TropicalWeight(Pieces{{2.0, 0.5, 0.0}, {0.0, 1.0, 1.0}, {0.25, 0.0, 3.0}}));
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> mu{u(gen), u(gen), u(gen)}, up = mu;
        for (auto& v : up) v += u(gen) * 0.5;
        const auto a = newton_membership(body, mu).kind;
        const auto b = newton_membership(body, up).kind;
        if (a != NewtonClass::outside) CHECK(b != NewtonClass::outside);
        if (a == NewtonClass::interior) CHECK(b == NewtonClass::interior);
    }
}

TEST_CASE("ideal membership examples") {
    const WeightPair line(TropicalWeight(Pieces{{1.0}}));
    CHECK(ideal_membership({0}, 1.0, line));
    CHECK_FALSE(ideal_membership({0}, 2.0, line));
    CHECK(ideal_membership({0, 0}, 3.0, WeightPair(TropicalWeight::monomial_max({1.0, 1.0}))));
    CHECK_THROWS_AS(ideal_membership({0}, -1.0, line), InvalidArgument);
}

TEST_CASE("membership near the threshold is decided exactly") {
    const WeightPair pair(TropicalWeight::monomial_max({0.5, 0.25}), TropicalWeight(Pieces{{0.5, 0.25}}));
    // c* = 2 (1 - 1/4) 0.5 + 2 (1 - 1/8) 0.25 = 1.1875
    CHECK_FALSE(ideal_membership({0, 0}, 1.1875, pair));
    CHECK(ideal_membership({0, 0}, 1.1875 - 1e-12, pair));
    LpOptions exact;
    exact.exact_rational = true;
    CHECK_FALSE(ideal_membership({0, 0}, 1.1875, pair, exact));
    CHECK(ideal_membership({0, 0}, 1.1875 - 0x1p-40, pair, exact));
}

TEST_CASE("membership matches the monomial-max closed form") {
    std::mt19937_64 gen(31);
    std::uniform_int_distribution<int> dim(1, 4), entry(0, 4), eighths(2, 40);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(dim(gen));
        std::vector<double> w(n);
        std::vector<int> a(n);
        double threshold = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = eighths(gen) / 8.0;
            a[i] = entry(gen);
            threshold += 2.0 * (a[i] + 1) * w[i];
        }
        const double c = u(gen) * 2.0 * threshold;
        if (std::fabs(c - threshold) < 1e-7) continue;
        CHECK(ideal_membership(MultiIndex(a), c, WeightPair(TropicalWeight::monomial_max(w))) == (c < threshold));
    }
}

TEST_CASE("membership is monotone in c") {
    const WeightPair pair(TropicalWeight(Pieces{{1.0, 0.5}, {0.25, 2.0}}), TropicalWeight(Pieces{{0.5, 0.0}, {0.0, 0.75}}));
    for (int a0 = 0; a0 < 3; ++a0)
        for (int a1 = 0; a1 < 3; ++a1) {
            bool prev = true;
            for (double c = 0.0; c < 12.0; c += 0.125) {
                const bool now = ideal_membership({a0, a1}, c, pair);
                if (!prev) CHECK_FALSE(now);
                prev = now;
            }
            CHECK_FALSE(prev);
        }
}

TEST_CASE("psi integrability") {
    const WeightPair steep(TropicalWeight(Pieces{{1.0}}), TropicalWeight(Pieces{{3.0}}));
    CHECK_FALSE(psi_integrable({0}, steep));
    CHECK(psi_integrable({1}, steep));
    const WeightPair mild(TropicalWeight(Pieces{{1.0}}), TropicalWeight(Pieces{{1.0}}));
    CHECK(psi_integrable({0}, mild));
}

TEST_CASE("threshold LP") {
    const Pieces lambda{{1.0, 0.0}, {0.0, 0.5}};
    const Pieces objective{{2.0, 2.0}};
    const auto r = threshold_lp(objective, lambda);
    CHECK(r.value == doctest::Approx(6.0));
    std::vector<std::vector<Rational>> exact_obj{{Rational(2), Rational(2)}};
    CHECK(threshold_lp_exact(exact_obj, lambda).value == Rational(6));
}
