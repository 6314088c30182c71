#pragma once

// Domain types: multi-indices, toric (tropical) weights, functionals acting on
// Taylor coefficients, polynomial germs, and the constructions relating them
// across dimensions (lift, product, restriction).

#include <complex>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "xicse/errors.hpp"

namespace xicse {

using Complex = std::complex<double>;

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries);
    MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

    static MultiIndex zero(std::size_t n);
    /// (a, b) in N^{n_a + n_b}.
    static MultiIndex concat(const MultiIndex& a, const MultiIndex& b);

    std::size_t dimension() const { return entries_.size(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    std::span<const int> entries() const { return entries_; }
    int degree() const;

    auto operator<=>(const MultiIndex&) const = default;

private:
    std::vector<int> entries_;
};

namespace detail {

/// Sparse finitely supported map MultiIndex -> nonzero complex number.
class SparseCoefficients {
public:
    using Map = std::map<MultiIndex, Complex>;

    SparseCoefficients(std::size_t dimension, Map terms);

    std::size_t dimension() const { return dimension_; }
    const Map& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    Complex coefficient(const MultiIndex& alpha) const;
    std::vector<MultiIndex> support() const;

    bool operator==(const SparseCoefficients&) const = default;

private:
    std::size_t dimension_;
    Map terms_;
};

}  // namespace detail

/// Holomorphic polynomial germ sum c_alpha z^alpha at the origin.
class Germ : public detail::SparseCoefficients {
public:
    Germ(std::size_t dimension, Map terms) : SparseCoefficients(dimension, std::move(terms)) {}

    static Germ monomial(const MultiIndex& alpha, Complex c = 1.0);
    static Germ constant(std::size_t n, Complex c = 1.0);

    Complex evaluate(std::span<const Complex> z) const;
    /// (F1 (x) F2)(z, w) = F1(z) F2(w).
    friend Germ tensor(const Germ& f1, const Germ& f2);

    bool operator==(const Germ&) const = default;
};

/// Finitely supported element of l1, optionally flagged as having an infinite tail.
class Functional : public detail::SparseCoefficients {
public:
    Functional(std::size_t dimension, Map terms, bool infinite_tail = false);

    static Functional zero(std::size_t n);
    static Functional delta(const MultiIndex& alpha, Complex c = 1.0);

    bool infinite_tail() const { return infinite_tail_; }
    bool is_zero() const { return empty() && !infinite_tail_; }

    /// a*xi1 + b*xi2 on finite parts.
    friend Functional linear_combination(Complex a, const Functional& xi1, Complex b, const Functional& xi2);

    bool operator==(const Functional&) const = default;

private:
    bool infinite_tail_ = false;
};

/// phi(z) = offset + max_j sum_i lambda_{j,i} log|z_i| on the unit polydisc.
///
/// Pieces are kept in canonical form: duplicates and pieces that never attain
/// the minimum of the log-gauge g(x) = min_j <lambda_j, x> are removed (decided
/// by an exact LP), and the rest are sorted lexicographically.
class TropicalWeight {
public:
    TropicalWeight(std::vector<std::vector<double>> pieces, double offset = 0.0);

    /// phi_w = max_i (1/w_i) log|z_i|.
    static TropicalWeight monomial_max(std::span<const double> w, double offset = 0.0);
    static TropicalWeight monomial_max(std::initializer_list<double> w, double offset = 0.0) {
        return monomial_max(std::span<const double>(w.begin(), w.size()), offset);
    }

    std::size_t dimension() const { return dimension_; }
    const std::vector<std::vector<double>>& pieces() const { return pieces_; }
    double offset() const { return offset_; }

    /// g(x) = min_j <lambda_j, x> for x >= 0 (weight_eval_log).
    double gauge(std::span<const double> x) const;
    /// phi(z) itself; -inf where some used coordinate vanishes.
    double value(std::span<const Complex> z) const;

    /// Coordinate scales w when every piece is a positive multiple of a distinct
    /// unit vector (monomial-max form); w_i = 0 for coordinates no piece uses.
    std::optional<std::vector<double>> axis_scales() const;
    bool single_piece() const { return pieces_.size() == 1; }

    TropicalWeight scaled(double c) const;
    TropicalWeight with_offset(double offset) const;

    bool operator==(const TropicalWeight& other) const {
        return dimension_ == other.dimension_ && offset_ == other.offset_ && pieces_ == other.pieces_;
    }

private:
    std::size_t dimension_ = 0;
    std::vector<std::vector<double>> pieces_;
    double offset_ = 0.0;
    // Exact scales as given to monomial_max, kept so closed forms reproduce 2<a+1, w> bit for bit.
    std::vector<double> given_scales_;
};

/// The pair (phi, psi); psi absent means the constant-zero weight.
class WeightPair {
public:
    WeightPair(TropicalWeight phi, std::optional<TropicalWeight> psi = std::nullopt);

    const TropicalWeight& phi() const { return phi_; }
    const std::optional<TropicalWeight>& psi() const { return psi_; }
    bool psi_is_zero() const { return !psi_.has_value(); }
    std::size_t dimension() const { return phi_.dimension(); }

    /// g_psi(x), zero when psi is zero.
    double psi_gauge(std::span<const double> x) const;
    double psi_offset() const { return psi_ ? psi_->offset() : 0.0; }
    std::span<const std::vector<double>> psi_pieces() const;

private:
    TropicalWeight phi_;
    std::optional<TropicalWeight> psi_;
};

/// (xi . F)(o) = sum_alpha xi_alpha c_alpha.
Complex pair(const Functional& xi, const Germ& f);

double weight_eval_log(const TropicalWeight& phi, std::span<const double> x);

/// P^* xi: coefficients moved to (alpha, 0, ..., 0) in C^n.
Functional lift_functional(const Functional& xi, std::size_t n);

Functional product_functional(const Functional& xi1, const Functional& xi2);

/// phi restricted to {z_{k+1} = ... = z_n = 0}. Throws IdenticallyNegInfinite
/// when every piece involves a vanishing coordinate.
TropicalWeight restrict_weight(const TropicalWeight& phi, std::size_t k);
WeightPair restrict_pair(const WeightPair& pair, std::size_t k);

/// (max{phi1 o pi1, phi2 o pi2}, psi1 o pi1 + psi2 o pi2) on C^{n1+n2}.
WeightPair combine_product(const WeightPair& first, const WeightPair& second);

/// Restriction of a weight on C^n x C^n to the diagonal {z = w}: each piece
/// (a, b) becomes a + b, since log|z_i| = log|w_i| there.
TropicalWeight restrict_to_diagonal(const TropicalWeight& phi);

}  // namespace xicse
