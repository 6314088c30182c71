#include "xicse/harness/generators.hpp"

#include "xicse/rng.hpp"

namespace xicse::harness {

Profile parse_profile(const std::string& name) {
    if (name == "product") return Profile::product;
    if (name == "tropical") return Profile::tropical;
    if (name == "restrictable") return Profile::restrictable;
    if (name == "productable") return Profile::productable;
    if (name == "valuative") return Profile::valuative;
    throw InvalidArgument("unknown instance profile '" + name + "'");
}

std::string to_string(Profile p) {
    switch (p) {
        case Profile::product: return "product";
        case Profile::tropical: return "tropical";
        case Profile::restrictable: return "restrictable";
        case Profile::productable: return "productable";
        case Profile::valuative: return "valuative";
    }
    return "unknown";
}

TropicalWeight random_axis_weight(Draw& d, std::size_t n) {
    std::vector<std::vector<double>> pieces;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> p(n, 0.0);
        p[i] = d.eighths(2, 32);
        pieces.push_back(std::move(p));
    }
    return TropicalWeight(std::move(pieces));
}

namespace {

std::vector<double> random_piece(Draw& d, std::size_t n, int hi) {
    std::vector<double> p(n);
    bool nonzero = false;
    for (auto& v : p) {
        v = d.coin(0.25) ? 0.0 : d.eighths(1, hi);
        nonzero = nonzero || v != 0.0;
    }
    if (!nonzero) p[static_cast<std::size_t>(d.integer(0, static_cast<int>(n) - 1))] = d.eighths(1, hi);
    return p;
}

}  // namespace

TropicalWeight random_tropical_weight(Draw& d, std::size_t n, std::size_t pieces) {
    std::vector<std::vector<double>> out;
    for (std::size_t j = 0; j < pieces; ++j) out.push_back(random_piece(d, n, 16));
    return TropicalWeight(std::move(out));
}

std::optional<TropicalWeight> random_psi(Draw& d, std::size_t n, bool allow_multi_piece) {
    if (d.coin(1.0 / 3.0)) return std::nullopt;
    const std::size_t count = allow_multi_piece ? static_cast<std::size_t>(d.integer(1, 2)) : 1;
    std::vector<std::vector<double>> pieces;
    for (std::size_t j = 0; j < count; ++j) {
        auto p = random_piece(d, n, 12);
        // Now and then a slope steep enough that low monomials stop being integrable.
        if (d.coin(0.1)) p[static_cast<std::size_t>(d.integer(0, static_cast<int>(n) - 1))] = d.eighths(16, 24);
        pieces.push_back(std::move(p));
    }
    return TropicalWeight(std::move(pieces));
}

MultiIndex random_multi_index(Draw& d, std::size_t n, int max_entry) {
    std::vector<int> e(n);
    for (auto& v : e) v = d.integer(0, max_entry);
    return MultiIndex(std::move(e));
}

namespace {

detail::SparseCoefficients::Map random_terms(Draw& d, std::size_t n, std::size_t max_terms, int max_entry) {
    detail::SparseCoefficients::Map terms;
    const auto count = static_cast<std::size_t>(d.integer(1, static_cast<int>(max_terms)));
    while (terms.size() < count) {
        Complex c(d.integer(-8, 8) / 8.0, d.integer(-8, 8) / 8.0);
        if (c == Complex(0.0)) c = 1.0;
        terms[random_multi_index(d, n, max_entry)] = c;
    }
    return terms;
}

}  // namespace

Functional random_functional(Draw& d, std::size_t n, std::size_t max_terms, int max_entry) {
    return Functional(n, random_terms(d, n, max_terms, max_entry));
}

Germ random_germ(Draw& d, std::size_t n, std::size_t max_terms, int max_entry) {
    return Germ(n, random_terms(d, n, max_terms, max_entry));
}

namespace {

void add_payload(Draw& d, InstanceSpec& spec) {
    const std::size_t n = spec.dimension();
    for (int i = 0; i < 2; ++i) spec.functionals.push_back(random_functional(d, n, 3, 3));
    for (int i = 0; i < 2; ++i) spec.germs.push_back(random_germ(d, n, 3, 3));
    spec.grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
}

InstanceSpec product_instance(Draw& d, std::size_t n) {
    TropicalWeight phi = random_axis_weight(d, n);
    std::optional<TropicalWeight> psi = random_psi(d, n, false);
    InstanceSpec spec(WeightPair(std::move(phi), std::move(psi)));
    add_payload(d, spec);
    return spec;
}

InstanceSpec tropical_instance(Draw& d, std::size_t n) {
    TropicalWeight phi = random_tropical_weight(d, n, static_cast<std::size_t>(d.integer(2, 4)));
    std::optional<TropicalWeight> psi = random_psi(d, n, true);
    InstanceSpec spec(WeightPair(std::move(phi), std::move(psi)));
    add_payload(d, spec);
    return spec;
}

InstanceSpec restrictable_instance(Draw& d) {
    const auto n = static_cast<std::size_t>(d.integer(2, 4));
    const auto k = static_cast<std::size_t>(d.integer(1, static_cast<int>(n) - 1));
    auto confined = [&](int hi) {
        std::vector<double> p(n, 0.0);
        for (std::size_t i = 0; i < k; ++i) p[i] = d.coin(0.25) ? 0.0 : d.eighths(1, hi);
        p[static_cast<std::size_t>(d.integer(0, static_cast<int>(k) - 1))] = d.eighths(1, hi);
        return p;
    };
    std::vector<std::vector<double>> phi{confined(16)};
    const auto extra = d.integer(1, 3);
    for (int j = 0; j < extra; ++j) phi.push_back(random_piece(d, n, 16));
    std::optional<TropicalWeight> psi;
    if (d.coin(0.5)) {
        std::vector<std::vector<double>> pieces{confined(12)};
        if (d.coin(0.5)) pieces.push_back(random_piece(d, n, 12));
        psi = TropicalWeight(std::move(pieces));
    }
    InstanceSpec spec(WeightPair(TropicalWeight(std::move(phi)), std::move(psi)));
    add_payload(d, spec);
    spec.restrict_to = k;
    return spec;
}

}  // namespace

std::vector<InstanceSpec> generate_instances(std::uint64_t seed, std::size_t count, Profile profile) {
    std::vector<InstanceSpec> out;
    for (std::size_t i = 0; i < count; ++i) {
        Draw d(derive_seed(seed, {static_cast<std::uint64_t>(profile), i}));
        switch (profile) {
            case Profile::product: out.push_back(product_instance(d, static_cast<std::size_t>(d.integer(1, 4)))); break;
            case Profile::tropical: out.push_back(tropical_instance(d, static_cast<std::size_t>(d.integer(2, 4)))); break;
            case Profile::restrictable: out.push_back(restrictable_instance(d)); break;
            case Profile::productable: {
                const bool axis = d.coin(0.5);
                for (int part = 0; part < 2; ++part) {
                    const auto n = static_cast<std::size_t>(d.integer(1, 2));
                    out.push_back(axis || n == 1 ? product_instance(d, n) : tropical_instance(d, n));
                }
                break;
            }
            case Profile::valuative: {
                const auto n = static_cast<std::size_t>(d.integer(1, 4));
                TropicalWeight phi = n == 1 || d.coin(0.4)
                                         ? random_axis_weight(d, n)
                                         : random_tropical_weight(d, n, static_cast<std::size_t>(d.integer(1, 4)));
                InstanceSpec spec{WeightPair(std::move(phi))};
                add_payload(d, spec);
                std::vector<double> w(n);
                for (auto& v : w) v = d.eighths(1, 32);
                spec.w = std::move(w);
                out.push_back(std::move(spec));
                break;
            }
        }
    }
    return out;
}

}  // namespace xicse::harness
