#pragma once

// Small dense linear programming.
//
// DenseSimplex is a two-phase primal simplex on a full tableau with Bland's
// pivoting rule. It is instantiated for double and for exact rationals; the
// rational instantiation is used whenever a sign decision has to be exact.

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xicse/errors.hpp"

namespace xicse {

using Rational = boost::multiprecision::mpq_rational;

/// Exact conversion (every finite double is a dyadic rational).
Rational to_rational(double value);
double to_double(const Rational& value);

enum class LpStatus { optimal, infeasible, unbounded };

template <class Scalar>
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Scalar objective{};
    std::vector<Scalar> x;
};

enum class RowSense { le, ge, eq };

template <class Scalar>
class DenseSimplex {
public:
    explicit DenseSimplex(std::size_t num_vars) : num_vars_(num_vars), cost_(num_vars) {}

    void set_cost(std::vector<Scalar> cost) {
        if (cost.size() != num_vars_) throw DimensionError("cost vector has wrong length");
        cost_ = std::move(cost);
    }

    void add_row(std::vector<Scalar> coeffs, RowSense sense, Scalar rhs) {
        if (coeffs.size() != num_vars_) throw DimensionError("constraint row has wrong length");
        rows_.push_back({std::move(coeffs), sense, std::move(rhs)});
    }

    std::size_t num_vars() const { return num_vars_; }
    std::size_t num_rows() const { return rows_.size(); }

    /// minimize cost . x subject to the rows and x >= 0.
    LpSolution<Scalar> solve() const;

private:
    struct Row {
        std::vector<Scalar> coeffs;
        RowSense sense;
        Scalar rhs;
    };

    std::size_t num_vars_;
    std::vector<Scalar> cost_;
    std::vector<Row> rows_;
};

extern template class DenseSimplex<double>;
extern template class DenseSimplex<Rational>;

/// Affine form x -> <gradient, x> + constant.
struct LinearForm {
    std::vector<double> gradient;
    double constant = 0.0;

    double operator()(std::span<const double> x) const;
};

struct SimplexLPResult {
    double value = 0.0;
    std::vector<double> argmin;
    /// Indices of forms attaining the max at argmin.
    std::vector<std::size_t> active;
};

struct ExactSimplexLPResult {
    Rational value;
    std::vector<Rational> argmin;
    std::vector<std::size_t> active;
};

/// min over the standard simplex {x >= 0, sum x = 1} of max_j forms[j](x).
SimplexLPResult min_of_max_on_simplex(std::span<const LinearForm> forms, std::size_t n);

/// Same problem solved in exact rational arithmetic from the (exact) double inputs.
ExactSimplexLPResult min_of_max_on_simplex_exact(std::span<const LinearForm> forms, std::size_t n);

}  // namespace xicse
