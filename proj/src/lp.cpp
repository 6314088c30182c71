#include "xicse/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xicse {

Rational to_rational(double value) {
    if (!std::isfinite(value)) throw InvalidArgument("cannot convert a non-finite value to a rational");
    return Rational(value);
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

namespace {

template <class Scalar>
struct Tolerance;

template <>
struct Tolerance<double> {
    static constexpr double eps = 1e-11;
    static bool negative(double v) { return v < -eps; }
    static bool positive(double v) { return v > eps; }
    static bool nonzero(double v) { return std::fabs(v) > eps; }
};

template <>
struct Tolerance<Rational> {
    static bool negative(const Rational& v) { return v < 0; }
    static bool positive(const Rational& v) { return v > 0; }
    static bool nonzero(const Rational& v) { return v != 0; }
};

constexpr int kMaxPivots = 100000;

template <class Scalar>
class Tableau {
public:
    using Tol = Tolerance<Scalar>;

    Tableau(std::size_t rows, std::size_t cols) : cols_(cols), a_(rows, std::vector<Scalar>(cols + 1)), basis_(rows) {}

    Scalar& at(std::size_t i, std::size_t j) { return a_[i][j]; }
    Scalar& rhs(std::size_t i) { return a_[i][cols_]; }
    std::size_t& basis(std::size_t i) { return basis_[i]; }
    std::size_t rows() const { return a_.size(); }

    void pivot(std::size_t r, std::size_t s, std::vector<Scalar>& z) {
        const Scalar inv = Scalar(1) / a_[r][s];
        for (auto& v : a_[r]) v *= inv;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (i == r || !Tol::nonzero(a_[i][s])) continue;
            const Scalar f = a_[i][s];
            for (std::size_t j = 0; j <= cols_; ++j) a_[i][j] -= f * a_[r][j];
            a_[i][s] = 0;
        }
        if (Tol::nonzero(z[s])) {
            const Scalar f = z[s];
            for (std::size_t j = 0; j <= cols_; ++j) z[j] -= f * a_[r][j];
            z[s] = 0;
        }
        basis_[r] = s;
    }

    /// Bland's rule iterations over columns [0, allowed). Returns false if unbounded.
    bool optimize(std::vector<Scalar>& z, std::size_t allowed) {
        for (int iter = 0; iter < kMaxPivots; ++iter) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (Tol::negative(z[j])) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return true;
            std::size_t leave = rows();
            Scalar best{};
            for (std::size_t i = 0; i < rows(); ++i) {
                if (!Tol::positive(a_[i][enter])) continue;
                Scalar ratio = a_[i][cols_] / a_[i][enter];
                if (leave == rows() || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows()) return false;
            pivot(leave, enter, z);
        }
        throw NumericFailure("simplex exceeded the pivot limit");
    }

    void drop_row(std::size_t i) {
        a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
    }

private:
    std::size_t cols_;
    std::vector<std::vector<Scalar>> a_;
    std::vector<std::size_t> basis_;
};

}  // namespace

template <class Scalar>
LpSolution<Scalar> DenseSimplex<Scalar>::solve() const {
    using Tol = Tolerance<Scalar>;
    const std::size_t m = rows_.size();
    const std::size_t n = num_vars_;

    // Normalize to nonnegative right-hand sides.
    std::vector<Row> rows = rows_;
    std::size_t num_slack = 0;
    std::size_t num_art = 0;
    for (auto& row : rows) {
        if (row.rhs < 0) {
            for (auto& c : row.coeffs) c = -c;
            row.rhs = -row.rhs;
            if (row.sense == RowSense::le)
                row.sense = RowSense::ge;
            else if (row.sense == RowSense::ge)
                row.sense = RowSense::le;
        }
        if (row.sense != RowSense::eq) ++num_slack;
        if (row.sense != RowSense::le) ++num_art;
    }

    const std::size_t art_begin = n + num_slack;
    const std::size_t cols = art_begin + num_art;
    Tableau<Scalar> tab(m, cols);
    std::size_t slack = n;
    std::size_t art = art_begin;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = rows[i].coeffs[j];
        tab.rhs(i) = rows[i].rhs;
        switch (rows[i].sense) {
            case RowSense::le:
                tab.at(i, slack) = 1;
                tab.basis(i) = slack++;
                break;
            case RowSense::ge:
                tab.at(i, slack++) = -1;
                tab.at(i, art) = 1;
                tab.basis(i) = art++;
                break;
            case RowSense::eq:
                tab.at(i, art) = 1;
                tab.basis(i) = art++;
                break;
        }
    }

    LpSolution<Scalar> out;

    // Phase I: minimize the sum of artificials.
    if (num_art > 0) {
        std::vector<Scalar> z(cols + 1);
        for (std::size_t j = art_begin; j < cols; ++j) z[j] = 1;
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis(i) < art_begin) continue;
            for (std::size_t j = 0; j <= cols; ++j) z[j] -= tab.at(i, j);
        }
        tab.optimize(z, cols);
        if (Tol::positive(-z[cols])) {
            out.status = LpStatus::infeasible;
            return out;
        }
        // Drive remaining artificials out of the basis.
        for (std::size_t i = 0; i < tab.rows();) {
            if (tab.basis(i) < art_begin) {
                ++i;
                continue;
            }
            std::size_t col = art_begin;
            for (std::size_t j = 0; j < art_begin; ++j) {
                if (Tol::nonzero(tab.at(i, j))) {
                    col = j;
                    break;
                }
            }
            if (col == art_begin) {
                tab.drop_row(i);
            } else {
                tab.pivot(i, col, z);
                ++i;
            }
        }
    }

    // Phase II on the original objective, artificial columns excluded.
    std::vector<Scalar> z(cols + 1);
    for (std::size_t j = 0; j < n; ++j) z[j] = cost_[j];
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        const std::size_t b = tab.basis(i);
        if (b >= n || !Tol::nonzero(cost_[b])) continue;
        const Scalar f = cost_[b];
        for (std::size_t j = 0; j <= cols; ++j) z[j] -= f * tab.at(i, j);
    }
    if (!tab.optimize(z, art_begin)) {
        out.status = LpStatus::unbounded;
        return out;
    }

    out.status = LpStatus::optimal;
    out.x.assign(n, Scalar(0));
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        if (tab.basis(i) < n) out.x[tab.basis(i)] = tab.rhs(i);
    }
    out.objective = 0;
    for (std::size_t j = 0; j < n; ++j) out.objective += cost_[j] * out.x[j];
    return out;
}

template class DenseSimplex<double>;
template class DenseSimplex<Rational>;

double LinearForm::operator()(std::span<const double> x) const {
    if (x.size() != gradient.size()) throw DimensionError("linear form evaluated at a point of the wrong dimension");
    double acc = constant;
    for (std::size_t i = 0; i < x.size(); ++i) acc += gradient[i] * x[i];
    return acc;
}

namespace {

template <class Scalar>
Scalar convert(double v) {
    if constexpr (std::is_same_v<Scalar, double>)
        return v;
    else
        return to_rational(v);
}

// Epigraph form: minimize v with u = v + floor, u >= form_j(x), sum x = 1.
template <class Scalar>
LpSolution<Scalar> solve_min_of_max(std::span<const LinearForm> forms, std::size_t n, Scalar& floor) {
    if (forms.empty()) throw InvalidArgument("min_of_max_on_simplex needs at least one form");
    if (n == 0) throw InvalidArgument("simplex dimension must be positive");
    for (const auto& f : forms) {
        if (f.gradient.size() != n) throw DimensionError("form dimension does not match simplex dimension");
        for (double g : f.gradient)
            if (!std::isfinite(g)) throw InvalidArgument("form has a non-finite coefficient");
        if (!std::isfinite(f.constant)) throw InvalidArgument("form has a non-finite constant");
    }
    // Every form is >= min_i g_i + c on the simplex, so the optimum is >= floor.
    bool first = true;
    for (const auto& f : forms) {
        Scalar lo = convert<Scalar>(f.gradient[0]);
        for (double g : f.gradient) lo = std::min(lo, convert<Scalar>(g));
        lo += convert<Scalar>(f.constant);
        if (first || lo < floor) floor = lo;
        first = false;
    }

    DenseSimplex<Scalar> lp(n + 1);
    std::vector<Scalar> cost(n + 1, Scalar(0));
    cost[n] = 1;
    lp.set_cost(cost);
    for (const auto& f : forms) {
        std::vector<Scalar> row(n + 1);
        for (std::size_t i = 0; i < n; ++i) row[i] = convert<Scalar>(f.gradient[i]);
        row[n] = -1;
        lp.add_row(std::move(row), RowSense::le, floor - convert<Scalar>(f.constant));
    }
    std::vector<Scalar> ones(n + 1, Scalar(1));
    ones[n] = 0;
    lp.add_row(std::move(ones), RowSense::eq, Scalar(1));
    auto sol = lp.solve();
    if (sol.status != LpStatus::optimal) throw NumericFailure("simplex LP over the standard simplex did not reach an optimum");
    return sol;
}

}  // namespace

SimplexLPResult min_of_max_on_simplex(std::span<const LinearForm> forms, std::size_t n) {
    double floor = 0.0;
    auto sol = solve_min_of_max<double>(forms, n, floor);
    SimplexLPResult out;
    out.argmin.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    for (auto& v : out.argmin) v = std::max(v, 0.0);
    double total = 0.0;
    for (double v : out.argmin) total += v;
    for (auto& v : out.argmin) v /= total;
    // Report the max of the forms at the witness so value and argmin agree exactly.
    out.value = -std::numeric_limits<double>::infinity();
    std::vector<double> vals;
    for (const auto& f : forms) {
        vals.push_back(f(out.argmin));
        out.value = std::max(out.value, vals.back());
    }
    for (std::size_t j = 0; j < vals.size(); ++j)
        if (vals[j] >= out.value - 1e-12) out.active.push_back(j);
    return out;
}

ExactSimplexLPResult min_of_max_on_simplex_exact(std::span<const LinearForm> forms, std::size_t n) {
    Rational floor;
    auto sol = solve_min_of_max<Rational>(forms, n, floor);
    ExactSimplexLPResult out;
    out.argmin.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    out.value = sol.objective + floor;
    for (std::size_t j = 0; j < forms.size(); ++j) {
        Rational v = to_rational(forms[j].constant);
        for (std::size_t i = 0; i < n; ++i) v += to_rational(forms[j].gradient[i]) * out.argmin[i];
        if (v == out.value) out.active.push_back(j);
    }
    return out;
}

}  // namespace xicse
