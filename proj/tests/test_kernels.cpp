#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "xicse/kernels.hpp"

using namespace xicse;

namespace {

using Pieces = std::vector<std::vector<double>>;
constexpr double pi = std::numbers::pi;

const WeightPair& line() {
    static const WeightPair p(TropicalWeight(Pieces{{1.0}}));
    return p;
}

// Weighted L2 norm of a germ by orthogonality: sum |c_a|^2 d_a(t).
double germ_norm(const Germ& f, const WeightPair& pair, double t) {
    double s = 0.0;
    for (const auto& [a, c] : f.terms()) s += std::norm(c) * std::exp(d_alpha(pair, a, t).log_value);
    return s;
}

WeightPair random_product_pair(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<int> eighths(2, 24);
    std::vector<double> w(n), mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = eighths(gen) / 8.0;
        mu[i] = eighths(gen) / 16.0;
    }
    return WeightPair(TropicalWeight::monomial_max(w), TropicalWeight(Pieces{mu}));
}

Functional random_functional(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<int> entry(0, 3), count(1, 3), coef(-8, 8);
    Functional::Map m;
    for (int k = count(gen); k > 0; --k) {
        std::vector<int> a(n);
        for (auto& v : a) v = entry(gen);
        m[MultiIndex(a)] = Complex(coef(gen) / 8.0, coef(gen) / 8.0) + Complex(0.0, 1.0 / 16.0);
    }
    return Functional(n, m);
}

}  // namespace

TEST_CASE("kernel examples") {
    for (double t : {0.0, 0.5, 3.0})
        CHECK(kernel(Functional::delta({0}), line(), t).log_value == doctest::Approx(2.0 * t - std::log(pi)).epsilon(1e-15));
    const auto square = kernel(Functional::delta({0, 0}), WeightPair(TropicalWeight::monomial_max({1.0, 1.0})), 0.0);
    CHECK(std::exp(square.log_value) == doctest::Approx(1.0 / (pi * pi)).epsilon(1e-14));
    CHECK(square.method == MassMethod::exact_product);
    CHECK(square.stderr_log == 0.0);

    const Functional two(1, {{MultiIndex{0}, 1.0}, {MultiIndex{1}, 1.0}});
    CHECK(std::exp(kernel(two, line(), 0.0).log_value) == doctest::Approx(3.0 / pi).epsilon(1e-14));

    KernelOptions mc;
    mc.mode = MassMode::monte_carlo;
    mc.mc.samples = 200000;
    mc.mc.seed = 4;
    const auto est = kernel(two, line(), 0.0, mc);
    CHECK(est.monte_carlo());
    CHECK(std::fabs(est.log_value - std::log(3.0 / pi)) <= 3.0 * est.stderr_log);
}

TEST_CASE("kernel edge cases") {
    const WeightPair steep(TropicalWeight(Pieces{{1.0}}), TropicalWeight(Pieces{{3.0}}));
    const auto k = kernel(Functional::delta({0}), steep, 1.0);
    CHECK(k.is_zero());
    CHECK(k.log_value == -std::numeric_limits<double>::infinity());
    CHECK(kernel(Functional::zero(1), line(), 1.0).is_zero());
    CHECK_THROWS_AS(kernel(Functional(1, {{MultiIndex{0}, 1.0}}, true), line(), 0.0), UndefinedForInfiniteTail);
    CHECK_THROWS_AS(kernel(Functional::delta({0, 0}), line(), 0.0), DimensionError);
    CHECK_THROWS_AS(extremal_function(Functional::delta({0}), steep, 0.0), NotAvailable);
}

TEST_CASE("terms that need sampling make the whole kernel sampled") {
    const WeightPair general(TropicalWeight(Pieces{{1.0, 0.5}, {0.5, 1.0}}));
    const Functional xi(2, {{MultiIndex{0, 0}, 1.0}, {MultiIndex{1, 0}, 0.5}});
    const auto k = kernel(xi, general, 1.0);
    CHECK(k.monte_carlo());
    CHECK(k.stderr_log > 0.0);
    CHECK(k.terms == 2);
    CHECK(kernel(xi, general, 1.0).log_value == k.log_value);
    CHECK_THROWS_AS(kernel(xi, general, 1.0, KernelOptions{MassMode::exact, {}}), NotAvailable);
}

TEST_CASE("extremal function examples") {
    const auto one = extremal_function(Functional::delta({0, 0}), WeightPair(TropicalWeight::monomial_max({1.0, 2.0})), 1.5);
    CHECK(one.germ.size() == 1);
    CHECK(std::abs(one.germ.coefficient({0, 0}) - Complex(1.0)) < 1e-14);

    const Functional two(1, {{MultiIndex{0}, 1.0}, {MultiIndex{1}, 1.0}});
    const auto f = extremal_function(two, line(), 0.0);
    CHECK(std::abs(f.germ.coefficient({0}) - Complex(1.0 / 3.0)) < 1e-14);
    CHECK(std::abs(f.germ.coefficient({1}) - Complex(2.0 / 3.0)) < 1e-14);
}

TEST_CASE("extremal functions pair to one and realize 1/K") {
    std::mt19937_64 gen(61);
    std::uniform_int_distribution<int> dim(1, 3), coef(-8, 8);
    std::uniform_real_distribution<double> ut(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(dim(gen));
        const WeightPair weights = random_product_pair(gen, n);
        const Functional xi = random_functional(gen, n);
        const double t = ut(gen);
        if (kernel(xi, weights, t).is_zero()) continue;
        const auto ex = extremal_function(xi, weights, t);
        CHECK(std::abs(pair(xi, ex.germ) - Complex(1.0)) <= 1e-10);
        const double inv_k = std::exp(-ex.kernel.log_value);
        CHECK(germ_norm(ex.germ, weights, t) == doctest::Approx(inv_k).epsilon(1e-10));

        // Competitors: F0 plus anything xi annihilates, plus a rescaled random germ.
        for (int c = 0; c < 5; ++c) {
            Germ::Map g = ex.germ.terms();
            std::vector<int> a(n);
            for (auto& v : a) v = coef(gen) & 3;
            g[MultiIndex(a)] += Complex(coef(gen) / 8.0, coef(gen) / 8.0);
            Germ comp(n, g);
            const Complex p = pair(xi, comp);
            if (std::abs(p) < 1e-3) continue;
            Germ::Map scaled;
            for (const auto& [b, v] : comp.terms()) scaled[b] = v / p;
            const Germ normalized(n, scaled);
            CHECK(germ_norm(normalized, weights, t) >= inv_k * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("kernel curve of the disc") {
    const auto curve = kernel_curve(Functional::delta({0}), line(), parse_grid("0:5:11"));
    REQUIRE(curve.size() == 11);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(std::fabs(curve.log_k[i] - (2.0 * curve.grid[i] - std::log(pi))) <= 1e-12);
        if (i > 0) CHECK(curve.secant(i) == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK(std::isnan(curve.secant(0)));
    CHECK(std::isnan(curve.second_difference(10)));
}

TEST_CASE("log K is convex and t - log K is nondecreasing") {
    std::mt19937_64 gen(67);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<std::size_t>(1 + trial % 3);
        const WeightPair pair = random_product_pair(gen, n);
        const auto curve = kernel_curve(random_functional(gen, n), pair, linear_grid(0.0, 6.0, 25));
        for (std::size_t i = 1; i + 1 < curve.size(); ++i) CHECK(curve.second_difference(i) >= -1e-9);
    }
    const WeightPair cubic(TropicalWeight(Pieces{{3.0}}));
    const auto curve = kernel_curve(Functional::delta({0}), cubic, linear_grid(0.0, 5.0, 21));
    for (std::size_t i = 1; i < curve.size(); ++i)
        CHECK((curve.grid[i] - curve.log_k[i]) - (curve.grid[i - 1] - curve.log_k[i - 1]) >= -1e-9);
}

TEST_CASE("kernel laws: product, translation, scaling, monotonicity") {
    std::mt19937_64 gen(71);
    std::uniform_int_distribution<int> eighths(1, 16);
    for (int trial = 0; trial < 100; ++trial) {
        const WeightPair p1 = random_product_pair(gen, 1 + trial % 2);
        const WeightPair p2 = random_product_pair(gen, 1 + (trial / 2) % 2);
        const Functional x1 = random_functional(gen, p1.dimension());
        const Functional x2 = random_functional(gen, p2.dimension());
        const WeightPair both = combine_product(p1, p2);
        const Functional x12 = product_functional(x1, x2);
        for (double t : {0.0, 1.0, 2.5}) {
            const auto k1 = kernel(x1, p1, t), k2 = kernel(x2, p2, t), k12 = kernel(x12, both, t);
            if (k1.is_zero() || k2.is_zero()) {
                CHECK(k12.is_zero());
                continue;
            }
            CHECK(std::fabs(std::expm1(k12.log_value - k1.log_value - k2.log_value)) <= 1e-12);
        }

        const double a = eighths(gen) / 8.0, c = eighths(gen) / 4.0, t = eighths(gen) / 4.0;
        const TropicalWeight& phi = p1.phi();
        const WeightPair shifted(phi.with_offset(a), p1.psi());
        const WeightPair scaled(phi.scaled(c), p1.psi());
        const auto base = kernel(x1, p1, t);
        if (base.is_zero()) continue;
        CHECK(kernel(x1, shifted, t).log_value == doctest::Approx(kernel(x1, p1, t + a).log_value).epsilon(1e-12));
        CHECK(kernel(x1, scaled, t).log_value == doctest::Approx(kernel(x1, p1, t / c).log_value).epsilon(1e-12));
        CHECK(kernel(x1, p1, t + 0.5).log_value >= base.log_value);
    }
}

TEST_CASE("sampled kernels are reproducible per seed") {
    const WeightPair general(TropicalWeight(Pieces{{1.0, 0.5}, {0.5, 1.0}}));
    const Functional xi(2, {{MultiIndex{0, 0}, 1.0}, {MultiIndex{0, 1}, 2.0}});
    KernelOptions a, b;
    a.mc.seed = b.mc.seed = 12;
    b.mc.threads = 3;
    CHECK(kernel(xi, general, 0.75, a).log_value == kernel(xi, general, 0.75, b).log_value);
    a.mc.seed = 13;
    CHECK(kernel(xi, general, 0.75, a).log_value != kernel(xi, general, 0.75, b).log_value);
}

TEST_CASE("grids and csv") {
    CHECK(parse_grid("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(parse_grid("2:2:1") == std::vector<double>{2.0});
    CHECK_THROWS_AS(parse_grid("0:1"), InvalidArgument);
    CHECK_THROWS_AS(parse_grid("1:0:3"), InvalidArgument);
    CHECK_THROWS_AS(parse_grid("0:x:3"), InvalidArgument);
    CHECK_THROWS_AS(parse_grid("-1:1:3"), InvalidArgument);
    CHECK_THROWS_AS(kernel_curve(Functional::delta({0}), line(), {1.0, 0.5}), InvalidArgument);

    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

    const auto csv = kernel_curve(Functional::delta({0}), line(), parse_grid("0:1:2")).to_csv();
    std::istringstream in(csv);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header == "t,log_K,K,secant_slope,second_difference,method,stderr");
    auto fields = [](const std::string& row) {
        std::vector<std::string> out;
        std::istringstream s(row);
        for (std::string f; std::getline(s, f, ',');) out.push_back(f);
        return out;
    };
    const auto f0 = fields(row0), f1 = fields(row1);
    REQUIRE(f0.size() == 7);
    REQUIRE(f1.size() == 7);
    CHECK(f0[0] == "0");
    CHECK(std::stod(f0[1]) == -std::log(pi));
    CHECK(f0[3] == "nan");
    CHECK(f0[5] == "exact-product");
    CHECK(f0[6] == "0");
    CHECK(f1[0] == "1");
    CHECK(std::stod(f1[3]) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f1[4] == "nan");
}
