#include "xicse/integrals.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <vector>

#include "xicse/lp.hpp"
#include "xicse/polytope.hpp"
#include "xicse/rng.hpp"

namespace xicse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kLogPi = std::log(std::numbers::pi);
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

MassResult divergent(MassMethod method) {
    MassResult r;
    r.method = method;
    r.status = MassStatus::divergent;
    r.log_value = kInf;
    return r;
}

}  // namespace

std::string to_string(MassMethod m) {
    switch (m) {
        case MassMethod::exact_product: return "exact-product";
        case MassMethod::exact_hypoexp: return "exact-hypoexp";
        case MassMethod::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

std::string to_string(MassStatus s) {
    switch (s) {
        case MassStatus::ok: return "ok";
        case MassStatus::divergent: return "divergent";
        case MassStatus::indeterminate: return "indeterminate";
    }
    return "unknown";
}

MassResult d_alpha_product(std::span<const double> w, std::span<const double> rho, const MultiIndex& alpha, double t) {
    const std::size_t n = alpha.dimension();
    if (w.size() != n || rho.size() != n) throw DimensionError("d_alpha_product: w, rho and alpha differ in dimension");
    if (!(t >= 0.0)) throw InvalidArgument("d_alpha_product needs t >= 0");
    MassResult r;
    r.method = MassMethod::exact_product;
    double log_value = static_cast<double>(n) * kLogPi;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(w[i] >= 0.0)) throw InvalidArgument("disc scales must be nonnegative");
        const double e = alpha[i] + 1.0 - rho[i];
        if (!(e > 0.0)) return divergent(MassMethod::exact_product);
        log_value += -2.0 * e * w[i] * t - std::log(e);
    }
    r.log_value = log_value;
    return r;
}

// ------------------------------------------------------------ hypoexponential

namespace {

void check_hypoexp_args(std::span<const double> k, std::span<const double> a, double s) {
    if (k.size() != a.size() || k.empty()) throw DimensionError("hypoexp_tail: k and a differ in dimension");
    for (std::size_t i = 0; i < k.size(); ++i)
        if (!(k[i] > 0.0) || !(a[i] > 0.0) || !std::isfinite(k[i]) || !std::isfinite(a[i]))
            throw InvalidArgument("hypoexp_tail needs positive finite k and a");
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("hypoexp_tail needs s >= 0");
}

}  // namespace

double log_hypoexp_tail(std::span<const double> k, std::span<const double> a, double s) {
    check_hypoexp_args(k, a, s);
    long double log_prefix = 0.0L;
    for (double ki : k) log_prefix -= std::log(static_cast<long double>(ki));
    if (s == 0.0) return static_cast<double>(log_prefix);

    // S = sum b_i Y_i with Y_i ~ Exp(1); group equal rates r = 1/b into Erlang blocks.
    // Rates that differ only by rounding are merged: separate partial fractions
    // for them would cancel to nothing.
    std::vector<long double> rates;
    for (std::size_t i = 0; i < k.size(); ++i) rates.push_back(static_cast<long double>(k[i]) / a[i]);
    std::sort(rates.begin(), rates.end());
    std::vector<long double> r;
    std::vector<int> mult;
    for (auto v : rates) {
        if (!r.empty() && v - r.back() <= 1e-9L * v) {
            r.back() = (r.back() * mult.back() + v) / (mult.back() + 1);
            ++mult.back();
        } else {
            r.push_back(v);
            mult.push_back(1);
        }
    }
    const std::size_t groups = r.size();
    const long double r_min = r.front();
    const long double sl = s;

    // Density transform prod (r_h / (r_h + z))^{m_h}; its partial fractions at
    // z = -r_g come from the Taylor series of the other factors in eps = z + r_g.
    long double log_c = 0.0L;
    for (std::size_t h = 0; h < groups; ++h) log_c += mult[h] * std::log(r[h]);

    long double total = 0.0L;
    long double dominant = 0.0L;
    for (std::size_t g = 0; g < groups; ++g) {
        const int m = mult[g];
        std::vector<long double> series(m, 0.0L);
        series[0] = 1.0L;
        long double log_scale = log_c;
        int sign = 1;
        for (std::size_t h = 0; h < groups; ++h) {
            if (h == g) continue;
            const long double d = r[h] - r[g];
            log_scale -= mult[h] * std::log(std::fabs(d));
            if (d < 0 && (mult[h] % 2 == 1)) sign = -sign;
            // (1 + eps/d)^{-m_h} = sum_q C(m_h + q - 1, q) (-1/d)^q eps^q
            std::vector<long double> factor(m, 0.0L);
            long double coeff = 1.0L;
            for (int q = 0; q < m; ++q) {
                factor[q] = coeff;
                coeff *= -static_cast<long double>(mult[h] + q) / ((q + 1) * d);
            }
            std::vector<long double> next(m, 0.0L);
            for (int p = 0; p < m; ++p)
                for (int q = 0; p + q < m; ++q) next[p + q] += series[p] * factor[q];
            series = std::move(next);
        }
        // Survival of the j-th Erlang term: r^{-j} e^{-r s} sum_{i<j} (r s)^i / i!.
        const long double rs = r[g] * sl;
        long double group_sum = 0.0L;
        long double partial = 0.0L;
        long double power = 1.0L;
        for (int j = 1; j <= m; ++j) {
            partial += power;
            power *= rs / j;
            const long double a_gj = series[m - j];
            group_sum += a_gj * std::exp(-j * std::log(r[g])) * partial;
        }
        const long double term = sign * std::exp(log_scale - (r[g] - r_min) * sl) * group_sum;
        total += term;
        if (g == 0) dominant = term;
    }
    // Cancellation can only hurt where the slowest block does not dominate.
    if (!(total > 0.0L)) total = dominant;
    if (!(total > 0.0L)) throw NumericFailure("hypoexponential tail lost all precision");
    return static_cast<double>(log_prefix - r_min * sl + std::log(total));
}

double hypoexp_tail(std::span<const double> k, std::span<const double> a, double s) {
    return std::exp(log_hypoexp_tail(k, a, s));
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

constexpr std::uint64_t kChunk = 1u << 16;
constexpr std::uint64_t kCounterStride = 64;

struct Accum {
    long double sum = 0.0L;
    long double sumsq = 0.0L;
    std::uint64_t accepted = 0;
};

// Sums per_sample(i) over i < samples in fixed chunks combined in chunk order,
// so the result does not depend on the thread count.
template <class F>
Accum run_chunks(std::uint64_t samples, unsigned threads, const F& per_sample) {
    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<Accum> parts(chunks);
    auto work = [&](std::uint64_t first, std::uint64_t stride) {
        for (std::uint64_t c = first; c < chunks; c += stride) {
            Accum acc;
            const std::uint64_t end = std::min(samples, (c + 1) * kChunk);
            for (std::uint64_t i = c * kChunk; i < end; ++i) {
                const double v = per_sample(i);
                if (v > 0.0) {
                    acc.sum += v;
                    acc.sumsq += static_cast<long double>(v) * v;
                    ++acc.accepted;
                }
            }
            parts[c] = acc;
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned t = 0; t < threads; ++t) jobs.push_back(std::async(std::launch::async, work, t, threads));
        for (auto& j : jobs) j.get();
    }
    Accum total;
    for (const auto& p : parts) {
        total.sum += p.sum;
        total.sumsq += p.sumsq;
        total.accepted += p.accepted;
    }
    return total;
}

// Importance sampler for the integral over {g_phi(x) > T, x >= 0} of
// exp(-<k, x> + g_psi(x)).
//
// mu_bar is a convex combination of psi pieces with k' = k - mu_bar > 0, so
// g_psi(x) <= <mu_bar, x> and the integrand is at most exp(-<k', x>). The
// proposal is an even mixture of two densities:
//  - the tangent cone at the vertex x0 minimising <k', x> over the region.
//    With A the active constraint rows, x = x0 + A^{-1} c and c_i independent
//    exponentials of rate <k', column i of A^{-1}> (the dual multipliers), so
//    the density is proportional to exp(-<k', x>) on the cone. The mass of
//    the region concentrates there as T grows; for axis weights the cone is
//    the region itself.
//  - product exponentials with rates r = k' - beta * sum_j s_j lambda_j, s
//    the dual optimum. This one covers the whole region, keeps the weight
//    bounded by exp(-beta T sum s) / prod r, and beta puts its mean on the
//    boundary of the region.
class RegionSampler {
public:
    RegionSampler(const WeightPair& pair, std::vector<double> k, double level)
        : pair_(pair), k_(std::move(k)), raw_level_(level), level_(std::max(level, 0.0)), n_(k_.size()) {
        std::vector<double> mu_bar(n_, 0.0);
        const auto psi = pair.psi_pieces();
        if (psi.size() == 1) {
            mu_bar = psi.front();
        } else if (psi.size() > 1) {
            // min over theta in the simplex of max_i (sum_j theta_j mu_{j,i} - k_i)
            std::vector<LinearForm> forms(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                forms[i].gradient.resize(psi.size());
                for (std::size_t j = 0; j < psi.size(); ++j) forms[i].gradient[j] = psi[j][i] - k_[i];
            }
            const auto sol = min_of_max_on_simplex(forms, psi.size());
            for (std::size_t j = 0; j < psi.size(); ++j)
                for (std::size_t i = 0; i < n_; ++i) mu_bar[i] += sol.argmin[j] * psi[j][i];
        }
        kp_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) kp_[i] = std::max(k_[i] - mu_bar[i], 1e-9);

        const auto& pieces = pair.phi().pieces();
        corner_.assign(n_, 0.0);
        std::vector<double> pull(n_, 0.0);  // sum_j s_j lambda_j
        double s_total = 0.0;
        if (level_ > 0.0) {
            DenseSimplex<double> primal(n_);
            primal.set_cost(kp_);
            for (const auto& lambda : pieces) primal.add_row(lambda, RowSense::ge, level_);
            const auto corner = primal.solve();
            DenseSimplex<double> dual(pieces.size());
            dual.set_cost(std::vector<double>(pieces.size(), -1.0));
            for (std::size_t i = 0; i < n_; ++i) {
                std::vector<double> row(pieces.size());
                for (std::size_t j = 0; j < pieces.size(); ++j) row[j] = pieces[j][i];
                dual.add_row(std::move(row), RowSense::le, kp_[i]);
            }
            const auto sol = dual.solve();
            if (corner.status != LpStatus::optimal || sol.status != LpStatus::optimal)
                throw NumericFailure("proposal LP did not reach an optimum");
            for (std::size_t i = 0; i < n_; ++i) corner_[i] = std::max(corner.x[i], 0.0);
            for (std::size_t j = 0; j < pieces.size(); ++j) {
                const double sj = std::max(sol.x[j], 0.0);
                s_total += sj;
                for (std::size_t i = 0; i < n_; ++i) pull[i] += sj * pieces[j][i];
            }
            for (std::size_t i = 0; i < n_; ++i) pull[i] = std::min(pull[i], kp_[i]);
        }
        build_cone(pieces);

        auto rates_for = [&](double beta) {
            std::vector<double> r(n_);
            for (std::size_t i = 0; i < n_; ++i) r[i] = kp_[i] - beta * pull[i];
            return r;
        };
        auto mean_gauge = [&](double beta) {
            const auto r = rates_for(beta);
            std::vector<double> mean(n_);
            for (std::size_t i = 0; i < n_; ++i) mean[i] = 1.0 / r[i];
            return pair.phi().gauge(mean);
        };
        double beta = 0.0;
        if (level_ > 0.0 && s_total > 0.0 && mean_gauge(0.0) < level_) {
            double lo = 0.0, hi = 0.999;
            if (mean_gauge(hi) > level_) {
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (mean_gauge(mid) < level_ ? lo : hi) = mid;
                }
            }
            beta = hi;
        }
        rates_ = rates_for(beta);
        log_rates_ = 0.0;
        for (double r : rates_) log_rates_ += std::log(r);
        double corner_dot = 0.0;
        for (std::size_t i = 0; i < n_; ++i) corner_dot += kp_[i] * corner_[i];
        shift_ = -corner_dot - log_cone_norm_;
    }

    /// log(f/q) - shift at a fresh draw, or -inf outside the region.
    double draw(CounterRng& rng, std::vector<double>& x) const {
        const bool from_cone = rng.uniform() < 0.5;
        if (from_cone) {
            std::vector<double>& c = scratch();
            for (std::size_t i = 0; i < n_; ++i) c[i] = rng.exponential(cone_rates_[i]);
            for (std::size_t i = 0; i < n_; ++i) {
                double y = corner_[i];
                for (std::size_t j = 0; j < n_; ++j) y += rays_[i * n_ + j] * c[j];
                x[i] = y;
            }
        } else {
            for (std::size_t i = 0; i < n_; ++i) x[i] = rng.exponential(rates_[i]);
        }
        for (double v : x)
            if (!(v >= 0.0)) return -kInf;
        if (!(pair_.phi().gauge(x) > raw_level_)) return -kInf;

        double log_f = pair_.psi_gauge(x);
        double log_tilted = log_rates_;
        for (std::size_t i = 0; i < n_; ++i) {
            log_f -= k_[i] * x[i];
            log_tilted -= rates_[i] * x[i];
        }
        double log_cone = log_cone_norm_;
        bool in_cone = true;
        for (std::size_t i = 0; i < n_; ++i) {
            double ci = 0.0;
            for (std::size_t j = 0; j < n_; ++j) ci += active_[i * n_ + j] * (x[j] - corner_[j]);
            // Points drawn from the cone sit on it up to rounding.
            if (ci < -1e-9 * (1.0 + level_)) in_cone = false;
            log_cone -= cone_rates_[i] * std::max(ci, 0.0);
        }
        const double half = std::log(0.5);
        const double log_q = in_cone ? half + log_add(log_tilted, log_cone) : half + log_tilted;
        return log_f - log_q - shift_;
    }

    /// The estimate of the integral is exp(shift) * mean weight.
    double shift() const { return shift_; }

private:
    std::vector<double>& scratch() const {
        thread_local std::vector<double> buf;
        buf.resize(n_);
        return buf;
    }

    static double log_add(double a, double b) {
        const double m = std::max(a, b);
        return m + std::log1p(std::exp(std::min(a, b) - m));
    }

    void store(const Eigen::MatrixXd& m, std::vector<double>& out) const {
        out.resize(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    // Active rows at the corner: pieces with <lambda, x0> = T and coordinates
    // with x0_i = 0. Among n-subsets, take one whose cone rates are positive.
    void build_cone(const std::vector<std::vector<double>>& pieces) {
        const auto n = static_cast<Eigen::Index>(n_);
        std::vector<Eigen::VectorXd> rows;
        for (std::size_t i = 0; i < n_; ++i)
            if (corner_[i] <= 1e-12 * (1.0 + level_)) rows.push_back(Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(i)));
        if (level_ > 0.0)
            for (const auto& lambda : pieces) {
                double v = 0.0;
                for (std::size_t i = 0; i < n_; ++i) v += lambda[i] * corner_[i];
                if (std::fabs(v - level_) <= 1e-9 * (1.0 + level_))
                    rows.push_back(Eigen::Map<const Eigen::VectorXd>(lambda.data(), n));
            }
        const Eigen::Map<const Eigen::VectorXd> kp(kp_.data(), n);
        double best = 0.0;
        std::vector<std::size_t> pick(n_);
        std::function<void(std::size_t, std::size_t)> search = [&](std::size_t depth, std::size_t from) {
            if (depth == n_) {
                Eigen::MatrixXd a(n, n);
                for (std::size_t r = 0; r < n_; ++r) a.row(static_cast<Eigen::Index>(r)) = rows[pick[r]].transpose();
                const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
                if (!lu.isInvertible()) return;
                const Eigen::MatrixXd rays = lu.inverse();
                const Eigen::VectorXd rates = rays.transpose() * kp;
                const double smallest = rates.minCoeff();
                if (smallest > best) {
                    best = smallest;
                    store(a, active_);
                    store(rays, rays_);
                    cone_rates_.assign(rates.data(), rates.data() + n);
                    log_cone_norm_ = std::log(std::fabs(lu.determinant()));
                }
                return;
            }
            for (std::size_t r = from; r < rows.size(); ++r) {
                pick[depth] = r;
                search(depth + 1, r + 1);
            }
        };
        if (rows.size() <= 16) search(0, 0);
        if (cone_rates_.empty()) {
            // Degenerate corner: the orthant at x0 still lies in the region.
            store(Eigen::MatrixXd::Identity(n, n), active_);
            rays_ = active_;
            cone_rates_ = kp_;
            log_cone_norm_ = 0.0;
        }
        // Dual multipliers can vanish on a face of optimal corners; keep the
        // draw proper by bounding the spread along such rays.
        for (auto& r : cone_rates_) r = std::max(r, 1e-3 / (1.0 + level_));
        for (double r : cone_rates_) log_cone_norm_ += std::log(r);
    }

    const WeightPair& pair_;
    std::vector<double> k_;
    double raw_level_;
    double level_;
    std::size_t n_;
    std::vector<double> kp_, rates_, corner_, cone_rates_;
    // Row-major n x n: the active rows A and the rays A^{-1}.
    std::vector<double> active_, rays_;
    double log_rates_ = 0.0;
    double log_cone_norm_ = 0.0;
    double shift_ = 0.0;
};

MassResult finish_mc(const Accum& acc, std::uint64_t samples, std::uint64_t seed, double log_factor) {
    MassResult r;
    r.method = MassMethod::monte_carlo;
    r.samples = samples;
    r.seed = seed;
    r.accepted = acc.accepted;
    if (acc.accepted < 10) {
        r.status = MassStatus::indeterminate;
        r.log_value = kNaN;
        return r;
    }
    const long double nn = static_cast<long double>(samples);
    const long double mean = acc.sum / nn;
    const long double var = std::max(0.0L, acc.sumsq / nn - mean * mean);
    r.log_value = log_factor + static_cast<double>(std::log(mean));
    r.stderr_log = static_cast<double>(std::sqrt(var / nn) / mean);
    return r;
}

void check_mc_args(const WeightPair& pair, std::size_t dim, double t, std::uint64_t samples) {
    if (dim != pair.dimension()) throw DimensionError("Monte Carlo: dimension mismatch");
    if (samples < kMinMcSamples) throw InvalidArgument("Monte Carlo needs at least 10^4 samples");
    if (!(t >= 0.0)) throw InvalidArgument("Monte Carlo mass needs t >= 0");
    if (dim > 20) throw InvalidArgument("Monte Carlo supports dimension <= 20");
}

}  // namespace

McEstimate mc_hypoexp_tail(std::span<const double> k, std::span<const double> a, double s, std::uint64_t samples,
                           std::uint64_t seed) {
    check_hypoexp_args(k, a, s);
    if (samples < kMinMcSamples) throw InvalidArgument("Monte Carlo needs at least 10^4 samples");
    double inv_prod = 1.0;
    for (double ki : k) inv_prod /= ki;
    const Accum acc = run_chunks(samples, 1, [&](std::uint64_t i) {
        CounterRng rng(seed, i * kCounterStride);
        double sum = 0.0;
        for (std::size_t j = 0; j < k.size(); ++j) sum += (a[j] / k[j]) * rng.exponential(1.0);
        return sum > s ? 1.0 : 0.0;
    });
    const double p = static_cast<double>(acc.accepted) / static_cast<double>(samples);
    McEstimate out;
    out.mean = p * inv_prod;
    out.stderr_mean = std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) * inv_prod;
    out.accepted = acc.accepted;
    return out;
}

MassResult mc_mass(const WeightPair& pair, const MultiIndex& alpha, double t, std::uint64_t samples, std::uint64_t seed,
                   unsigned threads) {
    check_mc_args(pair, alpha.dimension(), t, samples);
    if (!psi_integrable(alpha, pair)) return divergent(MassMethod::monte_carlo);
    const std::size_t n = alpha.dimension();
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = 2.0 * alpha[i] + 2.0;
    const RegionSampler sampler(pair, k, t + pair.phi().offset());
    const Accum acc = run_chunks(samples, threads, [&](std::uint64_t i) {
        CounterRng rng(seed, i * kCounterStride);
        std::vector<double> x(n);
        const double lw = sampler.draw(rng, x);
        return lw == -kInf ? 0.0 : std::exp(lw);
    });
    const double log_factor = static_cast<double>(n) * kLog2Pi - pair.psi_offset() + sampler.shift();
    return finish_mc(acc, samples, seed, log_factor);
}

MassResult mc_germ_mass(const WeightPair& pair, const Germ& f, double t, std::uint64_t samples, std::uint64_t seed,
                        unsigned threads) {
    check_mc_args(pair, f.dimension(), t, samples);
    if (f.empty()) {
        MassResult r;
        r.method = MassMethod::monte_carlo;
        r.log_value = -kInf;
        return r;
    }
    const std::size_t n = f.dimension();
    for (const auto& [alpha, c] : f.terms())
        if (!psi_integrable(alpha, pair)) return divergent(MassMethod::monte_carlo);
    std::vector<int> low(n, std::numeric_limits<int>::max());
    for (const auto& [alpha, c] : f.terms())
        for (std::size_t i = 0; i < n; ++i) low[i] = std::min(low[i], alpha[i]);
    const MultiIndex base(low);
    if (!psi_integrable(base, pair))
        throw InvalidArgument("mc_germ_mass needs the componentwise-minimal exponent to be psi-integrable");
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = 2.0 * low[i] + 2.0;
    const RegionSampler sampler(pair, k, t + pair.phi().offset());
    const Accum acc = run_chunks(samples, threads, [&](std::uint64_t i) {
        CounterRng rng(seed, i * kCounterStride);
        std::vector<double> x(n);
        const double lw = sampler.draw(rng, x);
        if (lw == -kInf) return 0.0;
        std::vector<Complex> z(n);
        double lin = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = 2.0 * std::numbers::pi * rng.uniform();
            z[j] = std::polar(std::exp(-x[j]), angle);
            lin += 2.0 * low[j] * x[j];
        }
        return std::exp(lw + lin) * std::norm(f.evaluate(z));
    });
    const double log_factor = static_cast<double>(n) * kLog2Pi - pair.psi_offset() + sampler.shift();
    return finish_mc(acc, samples, seed, log_factor);
}

// ----------------------------------------------------------------- dispatcher

ExactRoute exact_route(const WeightPair& pair) {
    const bool psi_simple = pair.psi_is_zero() || pair.psi()->single_piece();
    if (!psi_simple) return ExactRoute::none;
    if (pair.phi().axis_scales()) return ExactRoute::product;
    if (pair.phi().single_piece()) return ExactRoute::hypoexp;
    return ExactRoute::none;
}

MassResult d_alpha(const WeightPair& pair, const MultiIndex& alpha, double t, MassMode mode, const McOptions& mc) {
    if (alpha.dimension() != pair.dimension()) throw DimensionError("d_alpha: dimension mismatch");
    if (!(t >= 0.0)) throw InvalidArgument("d_alpha needs t >= 0");
    const ExactRoute route = exact_route(pair);
    if (mode == MassMode::exact && route == ExactRoute::none)
        throw NotAvailable("no closed form for this weight pair");
    if (mode == MassMode::monte_carlo || route == ExactRoute::none)
        return mc_mass(pair, alpha, t, mc.samples, mc.seed, mc.threads);

    const std::size_t n = pair.dimension();
    // The whole polydisc once the shifted level is nonpositive.
    const double level = std::max(t + pair.phi().offset(), 0.0);
    std::vector<double> mu(n, 0.0);
    if (!pair.psi_is_zero()) mu = pair.psi()->pieces().front();

    if (route == ExactRoute::product) {
        const auto w = *pair.phi().axis_scales();
        std::vector<double> rho(n);
        for (std::size_t i = 0; i < n; ++i) rho[i] = 0.5 * mu[i];
        MassResult r = d_alpha_product(w, rho, alpha, level);
        if (r.finite()) r.log_value -= pair.psi_offset();
        return r;
    }

    // Single piece lambda: d = (2 pi)^n I^{2a+2-mu}_lambda(level); coordinates
    // with lambda_i = 0 are unconstrained and contribute 1/k_i.
    const auto& lambda = pair.phi().pieces().front();
    std::vector<double> k_used, a_used;
    double log_value = static_cast<double>(n) * kLog2Pi - pair.psi_offset();
    for (std::size_t i = 0; i < n; ++i) {
        const double ki = 2.0 * alpha[i] + 2.0 - mu[i];
        if (!(ki > 0.0)) return divergent(MassMethod::exact_hypoexp);
        if (lambda[i] == 0.0) {
            log_value -= std::log(ki);
        } else {
            k_used.push_back(ki);
            a_used.push_back(lambda[i]);
        }
    }
    MassResult r;
    r.method = MassMethod::exact_hypoexp;
    r.log_value = log_value + log_hypoexp_tail(k_used, a_used, level);
    return r;
}

}  // namespace xicse
