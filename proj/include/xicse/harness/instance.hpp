#pragma once

// JSON instance files ("schema": "xicse/1") and the JSON encodings of the
// domain types.
//
//   {
//     "schema": "xicse/1",
//     "dimension": 2,
//     "phi": {"pieces": [[1, 0], [0, 0.5]], "offset": 0},   or {"w": [1, 2]}
//     "psi": {"pieces": [[0.5, 0]]},                        absent or null = 0
//     "functionals": [[{"alpha": [0, 0], "re": 1, "im": 0}]],
//     "germs": [[{"alpha": [1, 0], "re": 1}]],
//     "grid": "0:5:11",
//     "seed": 7, "samples": 200000, "tol": 1e-9,
//     "w": [1, 3], "mu": [1, 1], "c": 1.5, "restrict_to": 1
//   }
//
// A functional is a term list or {"terms": [...], "infinite_tail": true};
// "functional" / "germ" are accepted as one-element shorthands.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xicse/core.hpp"
#include "xicse/exponents.hpp"

namespace xicse::harness {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "xicse/1";

/// Rejected input; pointer() is a JSON pointer to the offending field.
class ParseError : public InvalidArgument {
public:
    ParseError(std::string pointer, const std::string& message)
        : InvalidArgument(pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

struct InstanceSpec {
    explicit InstanceSpec(WeightPair p) : pair(std::move(p)) {}

    WeightPair pair;
    std::vector<Functional> functionals;
    std::vector<Germ> germs;
    std::vector<double> grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<double> tol;
    /// Valuation weights (kiselman and the valuative checks).
    std::optional<std::vector<double>> w;
    /// Slope vector for Newton-body queries.
    std::optional<std::vector<double>> mu;
    std::optional<double> c;
    /// Coordinate subspace {z_{k+1} = ... = z_n = 0} for restriction checks.
    std::optional<std::size_t> restrict_to;

    std::size_t dimension() const { return pair.dimension(); }
};

InstanceSpec parse_instance(const Json& j);
InstanceSpec parse_instance_text(const std::string& text);
InstanceSpec load_instance(const std::string& path);

Json to_json(const InstanceSpec& spec);
Json to_json(const TropicalWeight& phi);
Json to_json(const Functional& xi);
Json to_json(const Germ& f);
Json to_json(const MultiIndex& alpha);

/// {"value": number | "+inf" | "-inf", "marker": "not-psi-integrable"?, "exact": "p/q"?}
Json to_json(const ExtendedExponent& e);

/// JSON numbers cannot hold inf or nan; those become strings.
Json number_or_string(double v);

TropicalWeight parse_weight(const Json& j, const std::string& pointer, std::optional<std::size_t> dimension);
Functional parse_functional(const Json& j, const std::string& pointer, std::size_t dimension);
Germ parse_germ(const Json& j, const std::string& pointer, std::size_t dimension);

}  // namespace xicse::harness
