// xicse: command-line front end.
//
// Exit codes: 0 success, 1 a verification violation, 2 invalid input,
// 3 numeric failure.

#include <bit>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "xicse/exponents.hpp"
#include "xicse/harness/generators.hpp"
#include "xicse/harness/instance.hpp"
#include "xicse/harness/verify.hpp"
#include "xicse/integrals.hpp"
#include "xicse/kernels.hpp"
#include "xicse/polytope.hpp"
#include "xicse/rng.hpp"

using namespace xicse;
using namespace xicse::harness;

namespace {

enum Exit { kOk = 0, kViolation = 1, kBadInput = 2, kNumeric = 3 };

struct Globals {
    std::uint64_t seed = 7;
    std::uint64_t samples = 200000;
    double tol = 1e-9;
    std::string grid;
    std::string format = "text";
    bool exact_rational = false;
    std::string instance_path;
    std::string inline_json;
    std::size_t functional = 0;
    std::string method = "auto";
    std::string mode = "auto";
    unsigned threads = 0;
};

unsigned thread_count(const Globals& g) {
    if (g.threads > 0) return g.threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

InstanceSpec load(const Globals& g) {
    if (!g.instance_path.empty() && !g.inline_json.empty())
        throw InvalidArgument("give either --instance or --inline, not both");
    if (!g.instance_path.empty()) return load_instance(g.instance_path);
    if (!g.inline_json.empty()) return parse_instance_text(g.inline_json);
    throw InvalidArgument("an instance is required (--instance FILE or --inline JSON)");
}

ExponentOptions exponent_options(const Globals& g) {
    ExponentOptions e;
    e.exact_rational = g.exact_rational;
    if (g.method == "auto")
        e.method = JumpingMethod::automatic;
    else if (g.method == "closed-form")
        e.method = JumpingMethod::closed_form;
    else if (g.method == "lp")
        e.method = JumpingMethod::lp;
    else if (g.method == "bisection")
        e.method = JumpingMethod::bisection;
    else
        throw InvalidArgument("--method must be auto, closed-form, lp or bisection");
    return e;
}

KernelOptions kernel_options(const Globals& g, const InstanceSpec& spec) {
    KernelOptions k;
    if (g.mode == "auto")
        k.mode = MassMode::automatic;
    else if (g.mode == "exact")
        k.mode = MassMode::exact;
    else if (g.mode == "mc")
        k.mode = MassMode::monte_carlo;
    else
        throw InvalidArgument("--mode must be auto, exact or mc");
    k.mc.seed = spec.seed.value_or(g.seed);
    k.mc.samples = spec.samples.value_or(g.samples);
    k.mc.threads = thread_count(g);
    return k;
}

std::vector<double> grid_for(const Globals& g, const InstanceSpec& spec) {
    if (!g.grid.empty()) return parse_grid(g.grid);
    if (!spec.grid.empty()) return spec.grid;
    return parse_grid("0:5:11");
}

const Functional& functional_at(const Globals& g, const InstanceSpec& spec) {
    if (spec.functionals.empty()) throw InvalidArgument("the instance has no functional");
    if (g.functional >= spec.functionals.size()) throw InvalidArgument("--functional index out of range");
    return spec.functionals[g.functional];
}

bool json_out(const Globals& g) {
    if (g.format != "text" && g.format != "json" && g.format != "csv")
        throw InvalidArgument("--format must be text, csv or json");
    return g.format == "json";
}

Json envelope() { return Json{{"schema", kSchema}}; }

std::string exponent_text(const ExtendedExponent& e) {
    std::string s = to_string(e);
    if (e.marker == ExponentMarker::not_psi_integrable) s += " (not psi-integrable)";
    return s;
}

Json curve_json(const KernelCurve& c) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < c.size(); ++i)
        rows.push_back(Json{{"t", c.grid[i]},
                            {"log_K", number_or_string(c.log_k[i])},
                            {"K", number_or_string(std::exp(c.log_k[i]))},
                            {"secant_slope", number_or_string(c.secant(i))},
                            {"second_difference", number_or_string(c.second_difference(i))},
                            {"method", to_string(c.method[i])},
                            {"stderr", c.stderr_log[i]}});
    return rows;
}

// ------------------------------------------------------------- subcommands

int cmd_kernel(const Globals& g) {
    const InstanceSpec spec = load(g);
    const auto curve = kernel_curve(functional_at(g, spec), spec.pair, grid_for(g, spec), kernel_options(g, spec));
    if (json_out(g)) {
        Json out = envelope();
        out["rows"] = curve_json(curve);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << curve.to_csv();
    }
    return kOk;
}

int cmd_gamma(const Globals& g) {
    const InstanceSpec spec = load(g);
    if (spec.functionals.empty()) throw InvalidArgument("the instance has no functional");
    const auto opts = exponent_options(g);
    Json results = Json::array();
    for (const auto& xi : spec.functionals) {
        const auto e = gamma(xi, spec.pair, opts);
        if (json_out(g))
            results.push_back(Json{{"functional", to_json(xi)}, {"gamma", to_json(e)}});
        else
            std::cout << exponent_text(e) << "\n";
    }
    if (json_out(g)) {
        Json out = envelope();
        out["results"] = results;
        std::cout << out.dump(2) << "\n";
    }
    return kOk;
}

int cmd_cse(const Globals& g) {
    const InstanceSpec spec = load(g);
    const auto e = cse(spec.pair, exponent_options(g));
    if (json_out(g)) {
        Json out = envelope();
        out["cse"] = to_json(e);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << exponent_text(e) << "\n";
    }
    return kOk;
}

int cmd_jn(const Globals& g) {
    const InstanceSpec spec = load(g);
    if (spec.germs.empty()) throw InvalidArgument("the instance has no germ");
    const auto opts = exponent_options(g);
    Json results = Json::array();
    for (const auto& f : spec.germs) {
        const auto e = jumping_number(f, spec.pair, opts);
        if (json_out(g)) {
            Json r{{"germ", to_json(f)}, {"jumping_number", to_json(e)}};
            if (e.is_finite() && e.marker == ExponentMarker::none && e.value > 0.0)
                r["computing_functional"] = to_json(computing_functional(f, spec.pair, opts));
            results.push_back(std::move(r));
        } else {
            std::cout << exponent_text(e) << "\n";
        }
    }
    if (json_out(g)) {
        Json out = envelope();
        out["results"] = results;
        std::cout << out.dump(2) << "\n";
    }
    return kOk;
}

int cmd_kiselman(const Globals& g) {
    const InstanceSpec spec = load(g);
    if (!spec.w) throw InvalidArgument("kiselman needs valuation weights \"w\" in the instance");
    const Valuation nu(*spec.w);
    const double k = kiselman(nu, spec.pair.phi());
    if (json_out(g)) {
        Json out = envelope();
        out["kiselman"] = k;
        out["thinness"] = thinness(nu);
        Json fs = Json::array();
        for (const auto& xi : spec.functionals) fs.push_back(number_or_string(valuation_of_functional(nu, xi)));
        Json gs = Json::array();
        for (const auto& f : spec.germs) gs.push_back(number_or_string(valuation_of_germ(nu, f)));
        out["functional_valuations"] = fs;
        out["germ_valuations"] = gs;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << format_double(k) << "\n";
    }
    return kOk;
}

int cmd_newton(const Globals& g) {
    const InstanceSpec spec = load(g);
    if (!spec.mu) throw InvalidArgument("newton needs a slope vector \"mu\" in the instance");
    LpOptions lp;
    lp.tol = spec.tol.value_or(g.tol);
    lp.exact_rational = g.exact_rational;
    const auto m = newton_membership(NewtonBody(spec.pair.phi()), *spec.mu, lp);
    const char* names[] = {"outside", "boundary", "interior"};
    const std::string kind = names[static_cast<int>(m.kind)];
    if (json_out(g)) {
        Json out = envelope();
        out["class"] = kind;
        out["margin"] = m.margin;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << kind << " " << format_double(m.margin) << "\n";
    }
    return kOk;
}

int cmd_extremal(const Globals& g, double t) {
    const InstanceSpec spec = load(g);
    const auto ext = extremal_function(functional_at(g, spec), spec.pair, t);
    if (json_out(g)) {
        Json out = envelope();
        out["t"] = t;
        out["log_K"] = ext.kernel.log_value;
        out["germ"] = to_json(ext.germ);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "log_K " << format_double(ext.kernel.log_value) << "\n";
        for (const auto& [alpha, c] : ext.germ.terms()) {
            std::cout << "alpha";
            for (int a : alpha.entries()) std::cout << ' ' << a;
            std::cout << "  " << format_double(c.real()) << ' ' << format_double(c.imag()) << "\n";
        }
    }
    return kOk;
}

int cmd_mc_check(const Globals& g) {
    const InstanceSpec spec = load(g);
    if (exact_route(spec.pair) == ExactRoute::none)
        throw InvalidArgument("mc-check needs a weight pair with a closed-form mass");
    const auto& xi = functional_at(g, spec);
    const auto grid = grid_for(g, spec);
    const std::uint64_t samples = spec.samples.value_or(g.samples);
    const std::uint64_t root = spec.seed.value_or(g.seed);
    Json rows = Json::array();
    std::size_t comparisons = 0, soft = 0, hard = 0;
    if (!json_out(g)) std::cout << "t,alpha,exact_log,mc_log,stderr,z\n";
    for (double t : grid)
        for (const auto& [alpha, c] : xi.terms()) {
            const MassResult exact = d_alpha(spec.pair, alpha, t);
            if (!exact.finite()) continue;
            std::uint64_t seed = derive_seed(root, {std::bit_cast<std::uint64_t>(t)});
            for (int a : alpha.entries()) seed = derive_seed(seed, {static_cast<std::uint64_t>(a)});
            const MassResult mc = mc_mass(spec.pair, alpha, t, samples, seed, thread_count(g));
            if (!mc.finite()) throw NumericFailure("Monte Carlo estimate is indeterminate; raise --samples");
            const double z = std::fabs(mc.log_value - exact.log_value) / mc.stderr_log;
            ++comparisons;
            if (z > 4.0)
                ++hard;
            else if (z > 3.0)
                ++soft;
            std::string label;
            for (int a : alpha.entries()) label += (label.empty() ? "" : " ") + std::to_string(a);
            if (json_out(g))
                rows.push_back(Json{{"t", t}, {"alpha", to_json(alpha)}, {"exact_log", exact.log_value}, {"mc_log", mc.log_value},
                                    {"stderr", mc.stderr_log}, {"z", z}});
            else
                std::cout << format_double(t) << ",(" << label << ")," << format_double(exact.log_value) << ','
                          << format_double(mc.log_value) << ',' << format_double(mc.stderr_log) << ',' << format_double(z) << "\n";
        }
    const bool ok = hard == 0 && soft <= (comparisons + 99) / 100;
    if (json_out(g)) {
        Json out = envelope();
        out["rows"] = rows;
        out["passed"] = ok;
        std::cout << out.dump(2) << "\n";
    }
    return ok ? kOk : kViolation;
}

int cmd_slope(const Globals& g, double t_max) {
    const InstanceSpec spec = load(g);
    const Functional xi = spec.functionals.empty() ? Functional::delta(MultiIndex::zero(spec.dimension())) : functional_at(g, spec);
    const auto est = gamma_numeric(xi, spec.pair, t_max, 9, kernel_options(g, spec), exponent_options(g));
    Json out = envelope();
    out["functional"] = to_json(xi);
    out["exact"] = to_json(*est.exact);
    Json secants = Json::array();
    for (std::size_t i = 1; i < est.curve.size(); ++i)
        secants.push_back(Json{{"t", est.curve.grid[i]},
                               {"secant", number_or_string(est.curve.secant(i))},
                               {"stderr", est.curve.stderr_log[i]},
                               {"method", to_string(est.curve.method[i])}});
    out["secants"] = secants;
    out["estimate"] = number_or_string(est.estimate);
    if (est.exact->is_finite() && est.exact->value != 0.0)
        out["relative_gap"] = number_or_string((est.exact->value - est.estimate) / est.exact->value);
    std::cout << out.dump(2) << "\n";
    return kOk;
}

int cmd_verify(const Globals& g, std::size_t instances, bool timing, const std::vector<std::string>& only) {
    VerifyOptions v;
    v.seed = g.seed;
    v.samples = g.samples;
    v.tol = g.tol;
    v.instances = instances;
    v.threads = thread_count(g);
    v.only.insert(only.begin(), only.end());
    const auto report = run_verification(v);
    if (json_out(g))
        std::cout << report.to_json(timing).dump(2) << "\n";
    else
        std::cout << report.to_text(timing);
    return report.passed() ? kOk : kViolation;
}

int cmd_generate(const Globals& g, std::size_t count, const std::string& profile) {
    const auto specs = generate_instances(g.seed, count, parse_profile(profile));
    Json list = Json::array();
    for (const auto& s : specs) list.push_back(to_json(s));
    std::cout << list.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xi-Bergman kernels and singularity exponents of toric weights"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Root seed for Monte Carlo and instance generation");
    app.add_option("--samples", g.samples, "Monte Carlo samples per mass (>= 10000)");
    app.add_option("--tol", g.tol, "Boundary tolerance");
    app.add_option("--grid", g.grid, "t grid as t0:t1:steps");
    app.add_option("--format", g.format, "text, csv or json");
    app.add_flag("--exact-rational", g.exact_rational, "Decide exponents in rational arithmetic");
    app.add_option("--instance", g.instance_path, "Instance JSON file");
    app.add_option("--inline", g.inline_json, "Instance JSON given inline");
    app.add_option("--functional", g.functional, "Index of the functional to use");
    app.add_option("--method", g.method, "Jumping-number method: auto, closed-form, lp, bisection");
    app.add_option("--mode", g.mode, "Mass evaluation: auto, exact, mc");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

    auto* kernel = app.add_subcommand("kernel", "Kernel curve on a t grid (CSV)");
    auto* gamma_cmd = app.add_subcommand("gamma", "gamma of each functional");
    auto* cse_cmd = app.add_subcommand("cse", "Complex singularity exponent c_o(phi, psi)");
    auto* jn = app.add_subcommand("jn", "Jumping number of each germ");
    auto* kis = app.add_subcommand("kiselman", "Kiselman number nu_w(phi)");
    auto* newton = app.add_subcommand("newton", "Classify mu against the Newton body");
    auto* extremal = app.add_subcommand("extremal", "Extremal germ at level t");
    double t_level = 0.0;
    extremal->add_option("--t", t_level, "Sublevel parameter t");
    auto* mc_check = app.add_subcommand("mc-check", "Monte Carlo against closed-form masses");
    auto* slope = app.add_subcommand("slope", "Secant slopes of log K against the exact gamma");
    double t_max = 40.0;
    slope->add_option("--t-max", t_max, "Largest t");
    auto* verify = app.add_subcommand("verify", "Run the property verification suite");
    std::size_t instances = 100;
    bool timing = false;
    std::vector<std::string> only;
    verify->add_option("--instances", instances, "Base instance count");
    verify->add_flag("--timing", timing, "Include runtimes (output no longer byte-deterministic)");
    verify->add_option("--only", only, "Run only these checks");
    auto* generate = app.add_subcommand("generate", "Print seeded instances as JSON");
    std::size_t count = 3;
    std::string profile = "product";
    generate->add_option("--count", count, "Number of instances");
    generate->add_option("--profile", profile, "product, tropical, restrictable, productable, valuative");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*kernel) return cmd_kernel(g);
        if (*gamma_cmd) return cmd_gamma(g);
        if (*cse_cmd) return cmd_cse(g);
        if (*jn) return cmd_jn(g);
        if (*kis) return cmd_kiselman(g);
        if (*newton) return cmd_newton(g);
        if (*extremal) return cmd_extremal(g, t_level);
        if (*mc_check) return cmd_mc_check(g);
        if (*slope) return cmd_slope(g, t_max);
        if (*verify) return cmd_verify(g, instances, timing, only);
        if (*generate) return cmd_generate(g, count, profile);
    } catch (const ParseError& e) {
        std::cerr << Json{{"error", "invalid input"}, {"pointer", e.pointer()}, {"message", e.what()}}.dump() << "\n";
        return kBadInput;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
    return kBadInput;
}
