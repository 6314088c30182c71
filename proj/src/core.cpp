#include "xicse/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "xicse/lp.hpp"

namespace xicse {

// ---------------------------------------------------------------- MultiIndex

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidArgument("multi-index must have dimension >= 1");
    for (int e : entries_)
        if (e < 0) throw InvalidArgument("multi-index entries must be nonnegative");
}

MultiIndex MultiIndex::zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

MultiIndex MultiIndex::concat(const MultiIndex& a, const MultiIndex& b) {
    std::vector<int> e(a.entries().begin(), a.entries().end());
    e.insert(e.end(), b.entries().begin(), b.entries().end());
    return MultiIndex(std::move(e));
}

int MultiIndex::degree() const {
    int d = 0;
    for (int e : entries_) d += e;
    return d;
}

// -------------------------------------------------------- SparseCoefficients

namespace detail {

SparseCoefficients::SparseCoefficients(std::size_t dimension, Map terms) : dimension_(dimension) {
    if (dimension_ == 0) throw InvalidArgument("dimension must be >= 1");
    for (auto& [alpha, c] : terms) {
        if (alpha.dimension() != dimension_) throw DimensionError("multi-index dimension does not match");
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InvalidArgument("coefficient is not finite");
        if (c != Complex(0.0)) terms_.emplace(alpha, c);
    }
}

Complex SparseCoefficients::coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Complex(0.0) : it->second;
}

std::vector<MultiIndex> SparseCoefficients::support() const {
    std::vector<MultiIndex> out;
    out.reserve(terms_.size());
    for (const auto& [alpha, c] : terms_) out.push_back(alpha);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------- Germ

Germ Germ::monomial(const MultiIndex& alpha, Complex c) { return Germ(alpha.dimension(), {{alpha, c}}); }

Germ Germ::constant(std::size_t n, Complex c) { return monomial(MultiIndex::zero(n), c); }

Complex Germ::evaluate(std::span<const Complex> z) const {
    if (z.size() != dimension()) throw DimensionError("germ evaluated at a point of the wrong dimension");
    Complex acc = 0.0;
    for (const auto& [alpha, c] : terms()) {
        Complex term = c;
        for (std::size_t i = 0; i < z.size(); ++i)
            for (int p = 0; p < alpha[i]; ++p) term *= z[i];
        acc += term;
    }
    return acc;
}

Germ tensor(const Germ& f1, const Germ& f2) {
    Germ::Map terms;
    for (const auto& [a, c1] : f1.terms())
        for (const auto& [b, c2] : f2.terms()) terms.emplace(MultiIndex::concat(a, b), c1 * c2);
    return Germ(f1.dimension() + f2.dimension(), std::move(terms));
}

// ---------------------------------------------------------------- Functional

Functional::Functional(std::size_t dimension, Map terms, bool infinite_tail)
    : SparseCoefficients(dimension, std::move(terms)), infinite_tail_(infinite_tail) {}

Functional Functional::zero(std::size_t n) { return Functional(n, {}); }

Functional Functional::delta(const MultiIndex& alpha, Complex c) { return Functional(alpha.dimension(), {{alpha, c}}); }

Functional linear_combination(Complex a, const Functional& xi1, Complex b, const Functional& xi2) {
    if (xi1.dimension() != xi2.dimension()) throw DimensionError("functionals of different dimension");
    Functional::Map terms;
    for (const auto& [alpha, c] : xi1.terms()) terms[alpha] += a * c;
    for (const auto& [alpha, c] : xi2.terms()) terms[alpha] += b * c;
    return Functional(xi1.dimension(), std::move(terms), xi1.infinite_tail() || xi2.infinite_tail());
}

// ------------------------------------------------------------ TropicalWeight

namespace {

// Piece j is redundant iff <lambda_j, x> >= min_{k != j} <lambda_k, x> on the
// orthant, i.e. min over the simplex of max_k <lambda_j - lambda_k, x> >= 0.
bool is_redundant(const std::vector<std::vector<double>>& pieces, std::size_t j, const std::vector<bool>& alive) {
    const std::size_t n = pieces[j].size();
    std::vector<LinearForm> forms;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (k == j || !alive[k]) continue;
        LinearForm f;
        f.gradient.resize(n);
        for (std::size_t i = 0; i < n; ++i) f.gradient[i] = pieces[j][i] - pieces[k][i];
        forms.push_back(std::move(f));
    }
    if (forms.empty()) return false;
    const double approx = min_of_max_on_simplex(forms, n).value;
    if (approx > 1e-9) return true;
    if (approx < -1e-9) return false;
    // Differences of doubles may round; decide on the exact pieces.
    std::vector<std::vector<Rational>> diffs;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (k == j || !alive[k]) continue;
        std::vector<Rational> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = to_rational(pieces[j][i]) - to_rational(pieces[k][i]);
        diffs.push_back(std::move(d));
    }
    DenseSimplex<Rational> lp(n + 1);
    std::vector<Rational> cost(n + 1);
    cost[n] = 1;
    lp.set_cost(cost);
    // u = v - M with M >= max |diff| keeps v >= 0.
    Rational shift = 0;
    for (const auto& d : diffs)
        for (const auto& v : d) shift = std::max(shift, Rational(abs(v)));
    for (auto& d : diffs) {
        d.push_back(Rational(-1));
        lp.add_row(std::move(d), RowSense::le, Rational(-shift));
    }
    std::vector<Rational> ones(n + 1, Rational(1));
    ones[n] = 0;
    lp.add_row(std::move(ones), RowSense::eq, Rational(1));
    auto sol = lp.solve();
    if (sol.status != LpStatus::optimal) throw NumericFailure("redundancy LP failed");
    return sol.objective - shift >= 0;
}

}  // namespace

TropicalWeight::TropicalWeight(std::vector<std::vector<double>> pieces, double offset) : offset_(offset) {
    if (pieces.empty()) throw InvalidArgument("tropical weight needs at least one piece");
    if (!std::isfinite(offset)) throw InvalidArgument("weight offset must be finite");
    dimension_ = pieces.front().size();
    if (dimension_ == 0) throw InvalidArgument("weight dimension must be >= 1");
    for (const auto& p : pieces) {
        if (p.size() != dimension_) throw DimensionError("weight pieces have different dimensions");
        bool nonzero = false;
        for (double v : p) {
            if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("weight piece entries must be finite and >= 0");
            if (v > 0.0) nonzero = true;
        }
        if (!nonzero) throw InvalidArgument("weight piece must be nonzero (phi(o) = -inf)");
    }
    std::sort(pieces.begin(), pieces.end());
    pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
    std::vector<bool> alive(pieces.size(), true);
    std::size_t remaining = pieces.size();
    for (std::size_t j = 0; j < pieces.size() && remaining > 1; ++j) {
        if (is_redundant(pieces, j, alive)) {
            alive[j] = false;
            --remaining;
        }
    }
    for (std::size_t j = 0; j < pieces.size(); ++j)
        if (alive[j]) pieces_.push_back(std::move(pieces[j]));
}

TropicalWeight TropicalWeight::monomial_max(std::span<const double> w, double offset) {
    std::vector<std::vector<double>> pieces;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0) || !std::isfinite(w[i])) throw InvalidArgument("monomial-max scales must be positive");
        std::vector<double> p(w.size(), 0.0);
        p[i] = 1.0 / w[i];
        pieces.push_back(std::move(p));
    }
    TropicalWeight out(std::move(pieces), offset);
    out.given_scales_.assign(w.begin(), w.end());
    return out;
}

double TropicalWeight::gauge(std::span<const double> x) const {
    if (x.size() != dimension_) throw DimensionError("point has the wrong dimension for this weight");
    for (double v : x)
        if (!(v >= 0.0)) throw InvalidArgument("log coordinates must be nonnegative");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) acc += p[i] * x[i];
        best = std::min(best, acc);
    }
    return best;
}

double TropicalWeight::value(std::span<const Complex> z) const {
    if (z.size() != dimension_) throw DimensionError("point has the wrong dimension for this weight");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) {
            if (p[i] == 0.0) continue;
            acc += p[i] * std::log(std::abs(z[i]));
        }
        best = std::max(best, acc);
    }
    return offset_ + best;
}

std::optional<std::vector<double>> TropicalWeight::axis_scales() const {
    if (!given_scales_.empty()) return given_scales_;
    std::vector<double> w(dimension_, 0.0);
    for (const auto& p : pieces_) {
        std::size_t nz = 0, axis = 0;
        for (std::size_t i = 0; i < dimension_; ++i)
            if (p[i] != 0.0) {
                ++nz;
                axis = i;
            }
        if (nz != 1 || w[axis] != 0.0) return std::nullopt;
        w[axis] = 1.0 / p[axis];
    }
    return w;
}

TropicalWeight TropicalWeight::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("weight scale must be positive");
    auto pieces = pieces_;
    for (auto& p : pieces)
        for (auto& v : p) v *= c;
    return TropicalWeight(std::move(pieces), offset_ * c);
}

TropicalWeight TropicalWeight::with_offset(double offset) const {
    TropicalWeight out = *this;
    if (!std::isfinite(offset)) throw InvalidArgument("weight offset must be finite");
    out.offset_ = offset;
    return out;
}

// ---------------------------------------------------------------- WeightPair

WeightPair::WeightPair(TropicalWeight phi, std::optional<TropicalWeight> psi) : phi_(std::move(phi)), psi_(std::move(psi)) {
    if (psi_ && psi_->dimension() != phi_.dimension()) throw DimensionError("phi and psi have different dimensions");
}

double WeightPair::psi_gauge(std::span<const double> x) const { return psi_ ? psi_->gauge(x) : 0.0; }

std::span<const std::vector<double>> WeightPair::psi_pieces() const {
    if (!psi_) return {};
    return psi_->pieces();
}

// ---------------------------------------------------------------- operations

Complex pair(const Functional& xi, const Germ& f) {
    if (xi.dimension() != f.dimension()) throw DimensionError("functional and germ have different dimensions");
    if (xi.infinite_tail()) throw UndefinedForInfiniteTail("pairing with an infinite-tail functional is undefined");
    using Base = detail::SparseCoefficients;
    const Base& a = xi.size() <= f.size() ? static_cast<const Base&>(xi) : f;
    const Base& b = xi.size() <= f.size() ? static_cast<const Base&>(f) : xi;
    Complex acc = 0.0;
    for (const auto& [alpha, c] : a.terms()) acc += c * b.coefficient(alpha);
    return acc;
}

double weight_eval_log(const TropicalWeight& phi, std::span<const double> x) { return phi.gauge(x); }

Functional lift_functional(const Functional& xi, std::size_t n) {
    const std::size_t k = xi.dimension();
    if (k >= n) throw InvalidArgument("lift target dimension must exceed the source dimension");
    Functional::Map terms;
    const auto pad = MultiIndex::zero(n - k);
    for (const auto& [alpha, c] : xi.terms()) terms.emplace(MultiIndex::concat(alpha, pad), c);
    return Functional(n, std::move(terms), xi.infinite_tail());
}

Functional product_functional(const Functional& xi1, const Functional& xi2) {
    Functional::Map terms;
    for (const auto& [a, c1] : xi1.terms())
        for (const auto& [b, c2] : xi2.terms()) terms.emplace(MultiIndex::concat(a, b), c1 * c2);
    const bool tail = (xi1.infinite_tail() && !xi2.is_zero()) || (xi2.infinite_tail() && !xi1.is_zero());
    return Functional(xi1.dimension() + xi2.dimension(), std::move(terms), tail);
}

TropicalWeight restrict_weight(const TropicalWeight& phi, std::size_t k) {
    const std::size_t n = phi.dimension();
    if (k < 1 || k >= n) throw InvalidArgument("restriction needs 1 <= k < n");
    std::vector<std::vector<double>> kept;
    for (const auto& p : phi.pieces()) {
        if (std::all_of(p.begin() + static_cast<std::ptrdiff_t>(k), p.end(), [](double v) { return v == 0.0; }))
            kept.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k));
    }
    if (kept.empty()) throw IdenticallyNegInfinite("weight restricted to the coordinate subspace is identically -inf");
    return TropicalWeight(std::move(kept), phi.offset());
}

WeightPair restrict_pair(const WeightPair& p, std::size_t k) {
    std::optional<TropicalWeight> psi;
    if (p.psi()) psi = restrict_weight(*p.psi(), k);
    return WeightPair(restrict_weight(p.phi(), k), std::move(psi));
}

namespace {

std::vector<double> padded(const std::vector<double>& v, std::size_t before, std::size_t after) {
    std::vector<double> out(before, 0.0);
    out.insert(out.end(), v.begin(), v.end());
    out.resize(before + v.size() + after, 0.0);
    return out;
}

}  // namespace

WeightPair combine_product(const WeightPair& first, const WeightPair& second) {
    const std::size_t n1 = first.dimension();
    const std::size_t n2 = second.dimension();
    if (first.phi().offset() != second.phi().offset())
        throw InvalidArgument("combine_product needs equal phi offsets");
    std::vector<std::vector<double>> phi;
    for (const auto& p : first.phi().pieces()) phi.push_back(padded(p, 0, n2));
    for (const auto& p : second.phi().pieces()) phi.push_back(padded(p, n1, 0));

    std::optional<TropicalWeight> psi;
    if (first.psi() || second.psi()) {
        std::vector<std::vector<double>> left, right;
        if (first.psi())
            for (const auto& p : first.psi()->pieces()) left.push_back(padded(p, 0, n2));
        else
            left.push_back(std::vector<double>(n1 + n2, 0.0));
        if (second.psi())
            for (const auto& p : second.psi()->pieces()) right.push_back(padded(p, n1, 0));
        else
            right.push_back(std::vector<double>(n1 + n2, 0.0));
        // g_{psi1 + psi2}(x, y) = g1(x) + g2(y) = min over pairs of summed forms.
        std::vector<std::vector<double>> sums;
        for (const auto& a : left)
            for (const auto& b : right) {
                std::vector<double> s(n1 + n2);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + b[i];
                sums.push_back(std::move(s));
            }
        psi = TropicalWeight(std::move(sums), first.psi_offset() + second.psi_offset());
    }
    return WeightPair(TropicalWeight(std::move(phi), first.phi().offset()), std::move(psi));
}

TropicalWeight restrict_to_diagonal(const TropicalWeight& phi) {
    const std::size_t n2 = phi.dimension();
    if (n2 % 2 != 0) throw InvalidArgument("diagonal restriction needs an even ambient dimension");
    const std::size_t n = n2 / 2;
    std::vector<std::vector<double>> pieces;
    for (const auto& p : phi.pieces()) {
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = p[i] + p[n + i];
        pieces.push_back(std::move(s));
    }
    return TropicalWeight(std::move(pieces), phi.offset());
}

}  // namespace xicse
