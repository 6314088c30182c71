#include "xicse/harness/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "xicse/kernels.hpp"

namespace xicse::harness {

namespace {

std::string child(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }
std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

double get_number(const Json& j, const std::string& pointer) {
    if (!j.is_number()) throw ParseError(pointer, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(pointer, "expected a finite number");
    return v;
}

// Parsed text gives unsigned numbers, but a Json built in memory may hold signed ones.
bool is_nonnegative_integer(const Json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

std::uint64_t get_unsigned(const Json& j, const std::string& pointer) {
    if (!is_nonnegative_integer(j)) throw ParseError(pointer, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::vector<double> get_vector(const Json& j, const std::string& pointer, std::optional<std::size_t> size) {
    if (!j.is_array()) throw ParseError(pointer, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], child(pointer, i)));
    if (size && out.size() != *size)
        throw ParseError(pointer, "expected " + std::to_string(*size) + " entries, got " + std::to_string(out.size()));
    return out;
}

MultiIndex get_multi_index(const Json& j, const std::string& pointer, std::size_t dimension) {
    if (!j.is_array()) throw ParseError(pointer, "expected an integer array");
    if (j.size() != dimension)
        throw ParseError(pointer, "expected " + std::to_string(dimension) + " entries, got " + std::to_string(j.size()));
    std::vector<int> entries;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!is_nonnegative_integer(j[i]) || j[i].get<std::uint64_t>() > 1000000)
            throw ParseError(child(pointer, i), "expected a nonnegative integer");
        entries.push_back(static_cast<int>(j[i].get<std::uint64_t>()));
    }
    return MultiIndex(std::move(entries));
}

detail::SparseCoefficients::Map get_terms(const Json& j, const std::string& pointer, std::size_t dimension) {
    if (!j.is_array()) throw ParseError(pointer, "expected a list of terms");
    detail::SparseCoefficients::Map terms;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = child(pointer, i);
        const Json& t = j[i];
        if (!t.is_object() || !t.contains("alpha")) throw ParseError(at, "expected {\"alpha\": [...], \"re\": ..., \"im\": ...}");
        MultiIndex alpha = get_multi_index(t["alpha"], child(at, "alpha"), dimension);
        const double re = t.contains("re") ? get_number(t["re"], child(at, "re")) : 0.0;
        const double im = t.contains("im") ? get_number(t["im"], child(at, "im")) : 0.0;
        if (terms.count(alpha)) throw ParseError(child(at, "alpha"), "repeated multi-index");
        terms[alpha] = Complex(re, im);
    }
    return terms;
}

template <class F>
auto rethrow_at(const std::string& pointer, F&& build) {
    try {
        return build();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(pointer, e.what());
    }
}

}  // namespace

TropicalWeight parse_weight(const Json& j, const std::string& pointer, std::optional<std::size_t> dimension) {
    if (!j.is_object()) throw ParseError(pointer, "expected {\"pieces\": [[...]]} or {\"w\": [...]}");
    const double offset = j.contains("offset") ? get_number(j["offset"], child(pointer, "offset")) : 0.0;
    if (j.contains("w")) {
        if (j.contains("pieces")) throw ParseError(pointer, "give either \"w\" or \"pieces\", not both");
        const auto w = get_vector(j["w"], child(pointer, "w"), dimension);
        return rethrow_at(child(pointer, "w"), [&] { return TropicalWeight::monomial_max(w, offset); });
    }
    if (!j.contains("pieces")) throw ParseError(child(pointer, "pieces"), "missing");
    const Json& pieces = j["pieces"];
    if (!pieces.is_array() || pieces.empty()) throw ParseError(child(pointer, "pieces"), "expected a nonempty array");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto at = child(child(pointer, "pieces"), i);
        out.push_back(get_vector(pieces[i], at, dimension ? dimension : std::optional<std::size_t>(pieces[0].size())));
        bool nonzero = false;
        for (std::size_t k = 0; k < out.back().size(); ++k) {
            if (out.back()[k] < 0.0) throw ParseError(child(at, k), "piece entries must be nonnegative");
            nonzero = nonzero || out.back()[k] != 0.0;
        }
        if (!nonzero) throw ParseError(at, "a piece must be nonzero");
    }
    return rethrow_at(child(pointer, "pieces"), [&] { return TropicalWeight(std::move(out), offset); });
}

Functional parse_functional(const Json& j, const std::string& pointer, std::size_t dimension) {
    if (j.is_object()) {
        if (!j.contains("terms")) throw ParseError(child(pointer, "terms"), "missing");
        bool tail = false;
        if (j.contains("infinite_tail")) {
            if (!j["infinite_tail"].is_boolean()) throw ParseError(child(pointer, "infinite_tail"), "expected a boolean");
            tail = j["infinite_tail"].get<bool>();
        }
        auto terms = get_terms(j["terms"], child(pointer, "terms"), dimension);
        return rethrow_at(pointer, [&] { return Functional(dimension, std::move(terms), tail); });
    }
    auto terms = get_terms(j, pointer, dimension);
    return rethrow_at(pointer, [&] { return Functional(dimension, std::move(terms)); });
}

Germ parse_germ(const Json& j, const std::string& pointer, std::size_t dimension) {
    auto terms = get_terms(j, pointer, dimension);
    return rethrow_at(pointer, [&] { return Germ(dimension, std::move(terms)); });
}

InstanceSpec parse_instance(const Json& j) {
    if (!j.is_object()) throw ParseError("", "an instance must be a JSON object");
    if (j.contains("schema") && j["schema"] != kSchema)
        throw ParseError("/schema", std::string("unsupported schema, expected ") + kSchema);
    std::optional<std::size_t> dimension;
    if (j.contains("dimension")) {
        const auto d = get_unsigned(j["dimension"], "/dimension");
        if (d < 1 || d > 64) throw ParseError("/dimension", "dimension must be between 1 and 64");
        dimension = static_cast<std::size_t>(d);
    }
    if (!j.contains("phi")) throw ParseError("/phi", "missing");
    TropicalWeight phi = parse_weight(j["phi"], "/phi", dimension);
    const std::size_t n = phi.dimension();
    std::optional<TropicalWeight> psi;
    if (j.contains("psi") && !j["psi"].is_null()) psi = parse_weight(j["psi"], "/psi", n);

    InstanceSpec spec(WeightPair(std::move(phi), std::move(psi)));
    if (j.contains("functional") && j.contains("functionals"))
        throw ParseError("/functional", "give either \"functional\" or \"functionals\"");
    if (j.contains("functional")) spec.functionals.push_back(parse_functional(j["functional"], "/functional", n));
    if (j.contains("functionals")) {
        const Json& list = j["functionals"];
        if (!list.is_array()) throw ParseError("/functionals", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            spec.functionals.push_back(parse_functional(list[i], child("/functionals", i), n));
    }
    if (j.contains("germ") && j.contains("germs")) throw ParseError("/germ", "give either \"germ\" or \"germs\"");
    if (j.contains("germ")) spec.germs.push_back(parse_germ(j["germ"], "/germ", n));
    if (j.contains("germs")) {
        const Json& list = j["germs"];
        if (!list.is_array()) throw ParseError("/germs", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) spec.germs.push_back(parse_germ(list[i], child("/germs", i), n));
    }
    if (j.contains("grid")) {
        const Json& g = j["grid"];
        if (g.is_string()) {
            spec.grid = rethrow_at("/grid", [&] { return parse_grid(g.get<std::string>()); });
        } else {
            spec.grid = get_vector(g, "/grid", std::nullopt);
            for (std::size_t i = 0; i < spec.grid.size(); ++i) {
                if (spec.grid[i] < 0.0) throw ParseError(child("/grid", i), "t must be >= 0");
                if (i > 0 && !(spec.grid[i] > spec.grid[i - 1]))
                    throw ParseError(child("/grid", i), "grid must be strictly increasing");
            }
        }
    }
    if (j.contains("seed")) spec.seed = get_unsigned(j["seed"], "/seed");
    if (j.contains("samples")) spec.samples = get_unsigned(j["samples"], "/samples");
    if (j.contains("tol")) {
        spec.tol = get_number(j["tol"], "/tol");
        if (!(*spec.tol > 0.0)) throw ParseError("/tol", "tolerance must be positive");
    }
    if (j.contains("w")) {
        spec.w = get_vector(j["w"], "/w", n);
        for (std::size_t i = 0; i < n; ++i)
            if (!((*spec.w)[i] > 0.0)) throw ParseError(child("/w", i), "valuation weights must be positive");
    }
    if (j.contains("mu")) spec.mu = get_vector(j["mu"], "/mu", n);
    if (j.contains("c")) {
        spec.c = get_number(j["c"], "/c");
        if (*spec.c < 0.0) throw ParseError("/c", "c must be >= 0");
    }
    if (j.contains("restrict_to")) {
        const auto k = get_unsigned(j["restrict_to"], "/restrict_to");
        if (k < 1 || k >= n) throw ParseError("/restrict_to", "need 1 <= restrict_to < dimension");
        spec.restrict_to = static_cast<std::size_t>(k);
    }
    return spec;
}

InstanceSpec parse_instance_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_instance(j);
}

InstanceSpec load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open instance file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance_text(buf.str());
}

Json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

Json to_json(const MultiIndex& alpha) { return Json(std::vector<int>(alpha.entries().begin(), alpha.entries().end())); }

Json to_json(const TropicalWeight& phi) { return Json{{"pieces", phi.pieces()}, {"offset", phi.offset()}}; }

namespace {

Json terms_json(const detail::SparseCoefficients& s) {
    Json out = Json::array();
    for (const auto& [alpha, c] : s.terms()) out.push_back(Json{{"alpha", to_json(alpha)}, {"re", c.real()}, {"im", c.imag()}});
    return out;
}

}  // namespace

Json to_json(const Functional& xi) {
    if (!xi.infinite_tail()) return terms_json(xi);
    return Json{{"terms", terms_json(xi)}, {"infinite_tail", true}};
}

Json to_json(const Germ& f) { return terms_json(f); }

Json to_json(const ExtendedExponent& e) {
    Json out;
    switch (e.kind) {
        case ExponentKind::neg_infinity: out["value"] = "-inf"; break;
        case ExponentKind::pos_infinity: out["value"] = "+inf"; break;
        case ExponentKind::finite: out["value"] = e.value; break;
    }
    if (e.marker == ExponentMarker::not_psi_integrable) out["marker"] = "not-psi-integrable";
    if (e.exact) out["exact"] = e.exact->str();
    return out;
}

Json to_json(const InstanceSpec& spec) {
    Json out;
    out["schema"] = kSchema;
    out["dimension"] = spec.dimension();
    out["phi"] = to_json(spec.pair.phi());
    out["psi"] = spec.pair.psi() ? to_json(*spec.pair.psi()) : Json(nullptr);
    if (!spec.functionals.empty()) {
        Json list = Json::array();
        for (const auto& xi : spec.functionals) list.push_back(to_json(xi));
        out["functionals"] = list;
    }
    if (!spec.germs.empty()) {
        Json list = Json::array();
        for (const auto& f : spec.germs) list.push_back(to_json(f));
        out["germs"] = list;
    }
    if (!spec.grid.empty()) out["grid"] = spec.grid;
    if (spec.seed) out["seed"] = *spec.seed;
    if (spec.samples) out["samples"] = *spec.samples;
    if (spec.tol) out["tol"] = *spec.tol;
    if (spec.w) out["w"] = *spec.w;
    if (spec.mu) out["mu"] = *spec.mu;
    if (spec.c) out["c"] = *spec.c;
    if (spec.restrict_to) out["restrict_to"] = *spec.restrict_to;
    return out;
}

}  // namespace xicse::harness
