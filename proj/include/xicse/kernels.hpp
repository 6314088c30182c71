#pragma once

// xi-Bergman kernels at the origin of the sublevel sets {phi < -t}.
//
// Sublevel sets of toric weights are Reinhardt, so monomials are orthogonal
// and the kernel is the series K(t) = sum |xi_a|^2 / d_a(t) over the support
// of xi, skipping monomials that are not square-integrable against e^{-psi}.

#include <string>
#include <vector>

#include "xicse/core.hpp"
#include "xicse/integrals.hpp"

namespace xicse {

struct KernelOptions {
    MassMode mode = MassMode::automatic;
    /// Root seed; each (alpha, t) gets its own stream derived from it.
    McOptions mc{};
};

struct KernelValue {
    /// log K; -inf when no support monomial contributes (K = 0).
    double log_value = 0.0;
    MassMethod method = MassMethod::exact_product;
    double stderr_log = 0.0;
    /// Support monomials that entered the series.
    std::size_t terms = 0;

    bool monte_carlo() const { return method == MassMethod::monte_carlo; }
    bool is_zero() const { return terms == 0; }
};

KernelValue kernel(const Functional& xi, const WeightPair& pair, double t, const KernelOptions& opts = {});

/// Minimizer of the weighted L^2 norm over germs with (xi . F)(o) = 1.
struct ExtremalGerm {
    Germ germ;
    KernelValue kernel;
};

/// F0 = (1/K) sum conj(xi_a)/d_a(t) z^a. Requires a closed-form mass route and K > 0.
ExtremalGerm extremal_function(const Functional& xi, const WeightPair& pair, double t);

struct KernelCurve {
    std::vector<double> grid;
    std::vector<double> log_k;
    std::vector<MassMethod> method;
    std::vector<double> stderr_log;

    std::size_t size() const { return grid.size(); }
    /// (log K_i - log K_{i-1}) / (t_i - t_{i-1}) for i >= 1.
    double secant(std::size_t i) const;
    /// secant(i + 1) - secant(i) for 1 <= i <= size - 2.
    double second_difference(std::size_t i) const;

    /// Columns t,log_K,K,secant_slope,second_difference,method,stderr; 17 significant digits.
    std::string to_csv() const;
};

/// Evenly spaced grid from "t0:t1:steps" (steps points, both ends included).
std::vector<double> parse_grid(const std::string& text);
std::vector<double> linear_grid(double t0, double t1, std::size_t steps);

KernelCurve kernel_curve(const Functional& xi, const WeightPair& pair, const std::vector<double>& grid,
                         const KernelOptions& opts = {});

/// Round-trip formatting used by every CSV and JSON writer.
std::string format_double(double v);

}  // namespace xicse
