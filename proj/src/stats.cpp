#include "incomenet/stats.hpp"

#include <algorithm>
#include <limits>
#include <atomic>
#include <cmath>
#include <numeric>

#include "incomenet/parallel.hpp"
#include "incomenet/rng.hpp"

namespace incomenet::stats {

void validate(const BetaParams& p) {
    if (!(std::isfinite(p.alpha) && std::isfinite(p.beta) && p.alpha > 0.0 && p.beta > 0.0)) {
        throw InvalidInputError("beta parameters must be finite and strictly positive");
    }
}

void validate(const DirichletParams& p) {
    if (p.alpha.size() < 2) {
        throw InvalidInputError("dirichlet needs at least two components");
    }
    for (double a : p.alpha) {
        if (!std::isfinite(a) || a <= 0.0) {
            throw InvalidInputError("dirichlet parameters must be finite and strictly positive");
        }
    }
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateInputError("correlation undefined for a constant sequence");
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DegenerateInputError("spearman needs two sequences of equal length >= 2");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

PermutationResult permutation_test(std::span<const EdgeRef> edges,
                                   std::span<const double> node_incomes, int rounds,
                                   std::uint64_t seed, int threads) {
    if (rounds < 1) throw InvalidInputError("permutation test needs at least one round");
    if (edges.empty()) throw DegenerateInputError("permutation test needs edges");

    const std::size_t m = edges.size();
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = node_incomes[edges[i].origin];
        ys[i] = node_incomes[edges[i].dest];
    }
    const double r_obs = spearman(xs, ys);

    std::atomic<std::int64_t> hits{0};
    parallel_for(static_cast<std::size_t>(rounds), threads, [&](std::size_t round) {
        auto eng = rng::make_engine(seed, round);
        std::vector<double> permuted(node_incomes.begin(), node_incomes.end());
        rng::shuffle(eng, permuted);
        std::vector<double> px(m), py(m);
        for (std::size_t i = 0; i < m; ++i) {
            px[i] = permuted[edges[i].origin];
            py[i] = permuted[edges[i].dest];
        }
        if (spearman(px, py) >= r_obs) hits.fetch_add(1, std::memory_order_relaxed);
    });

    PermutationResult out;
    out.r_observed = r_obs;
    out.rounds = rounds;
    out.p_value = (1.0 + static_cast<double>(hits.load())) / (static_cast<double>(rounds) + 1.0);
    return out;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

namespace {

// Lentz's continued fraction for the incomplete beta; standard form with
// even/odd coefficient pairs.
double beta_cont_frac(double a, double b, double x) {
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 1000; ++m) {
        const double dm = static_cast<double>(m);
        const double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double x, const BetaParams& p) {
    validate(p);
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InvalidInputError("reg_inc_beta domain is [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double a = p.alpha, b = p.beta;
    const double log_front =
        a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double beta_pdf(double x, const BetaParams& p) {
    validate(p);
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InvalidInputError("beta_pdf domain is [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        const double shape = (x == 0.0) ? p.alpha : p.beta;
        if (shape > 1.0) return 0.0;
        if (shape < 1.0) return std::numeric_limits<double>::infinity();
        // Limit of the density at the boundary when the shape there is 1.
        return std::exp(-log_beta(p.alpha, p.beta));
    }
    const double log_pdf = (p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) -
                           log_beta(p.alpha, p.beta);
    return std::exp(log_pdf);
}

namespace {

// Solves I_x = q for q in (0, 0.5] by bracketed Newton steps on the log of
// the CDF (well conditioned arbitrarily deep into the lower tail), with
// bisection whenever a step leaves the bracket.
double lower_quantile_impl(double q, const BetaParams& p) {
    const double log_q = std::log(q);
    double lo = 0.0, hi = 1.0;
    double x = std::clamp(p.alpha / (p.alpha + p.beta), 1e-12, 1.0 - 1e-12);
    for (int iter = 0; iter < 500; ++iter) {
        const double cdf = reg_inc_beta(x, p);
        if (cdf == q) return x;
        if (cdf > q) {
            hi = x;
        } else {
            lo = x;
        }
        double next = 0.5 * (lo + hi);
        if (cdf > 0.0) {
            const double log_err = std::log(cdf) - log_q;
            if (std::fabs(log_err) <= 1e-12) return x;
            const double pdf = beta_pdf(x, p);
            if (pdf > 0.0 && std::isfinite(pdf)) {
                const double step = log_err * cdf / pdf;
                const double candidate = x - step;
                if (candidate > lo && candidate < hi) next = candidate;
            }
        }
        if (next == x) return x;  // bracket exhausted at double precision
        x = next;
    }
    throw NumericError("beta_quantile did not converge");
}

}  // namespace

double beta_quantile(double q, const BetaParams& p) {
    validate(p);
    if (!(q > 0.0 && q < 1.0)) {
        throw InvalidInputError("beta_quantile domain is (0, 1)");
    }
    // Mirror the upper tail so the solver always works on the small side.
    if (q > 0.5) return 1.0 - lower_quantile_impl(1.0 - q, BetaParams{p.beta, p.alpha});
    return lower_quantile_impl(q, p);
}

BetaParams dirichlet_marginal(const DirichletParams& p, int category) {
    validate(p);
    if (category < 1 || category > static_cast<int>(p.alpha.size())) {
        throw InvalidInputError("dirichlet marginal index out of range");
    }
    const double total = std::accumulate(p.alpha.begin(), p.alpha.end(), 0.0);
    const double a_i = p.alpha[static_cast<std::size_t>(category - 1)];
    return BetaParams{a_i, total - a_i};
}

double dirichlet_log_pdf(std::span<const double> x, const DirichletParams& p) {
    validate(p);
    if (x.size() != p.alpha.size()) {
        throw InvalidInputError("simplex point dimension mismatch");
    }
    double sum = 0.0;
    for (double xi : x) {
        if (!(xi > 0.0)) throw InvalidInputError("simplex coordinates must be positive");
        sum += xi;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw InvalidInputError("simplex coordinates must sum to 1");
    }
    double log_norm = 0.0;
    double alpha_total = 0.0;
    double log_kernel = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        log_norm += std::lgamma(p.alpha[i]);
        alpha_total += p.alpha[i];
        log_kernel += (p.alpha[i] - 1.0) * std::log(x[i]);
    }
    log_norm -= std::lgamma(alpha_total);
    return log_kernel - log_norm;
}

}  // namespace incomenet::stats
