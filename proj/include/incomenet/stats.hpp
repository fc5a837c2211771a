#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "incomenet/errors.hpp"

namespace incomenet::stats {

struct BetaParams {
    double alpha = 1.0;
    double beta = 1.0;
};

struct DirichletParams {
    std::vector<double> alpha;
};

void validate(const BetaParams& p);
void validate(const DirichletParams& p);

// Average ranks (ties get the mean rank of their block), 1-based.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rank correlation: Pearson correlation of the average-ranked
// sequences. Throws DegenerateInputError when either input is constant or
// the sequences are shorter than 2.
double spearman(std::span<const double> x, std::span<const double> y);

// A directed edge referencing positions in a node-income array.
struct EdgeRef {
    std::uint32_t origin = 0;
    std::uint32_t dest = 0;
};

struct PermutationResult {
    double r_observed = 0.0;
    double p_value = 1.0;
    int rounds = 0;
};

// Permutation null for edge-income correlation: node incomes are shuffled
// uniformly over nodes (edge structure fixed) and the Spearman statistic is
// recomputed per round. p = (1 + #{r_perm >= r_obs}) / (m + 1), so p is
// never zero. Deterministic per (seed, round); rounds may run on several
// threads with identical results.
PermutationResult permutation_test(std::span<const EdgeRef> edges,
                                   std::span<const double> node_incomes, int rounds,
                                   std::uint64_t seed, int threads = 1);

double log_beta(double a, double b);

// Regularized incomplete beta I_x(alpha, beta), the Beta CDF. Continued
// fraction evaluation, absolute error <= 1e-12 on [0, 1].
double reg_inc_beta(double x, const BetaParams& p);

// Inverse of reg_inc_beta: x with |I_x - q| <= 1e-10, for q in (0, 1).
// Bracketed Newton iteration with bisection fallback; throws NumericError
// only on non-convergence (does not happen for alpha, beta <= 1e6).
double beta_quantile(double q, const BetaParams& p);

// Density of the Beta distribution at x in [0, 1], via log-gamma.
double beta_pdf(double x, const BetaParams& p);

// Marginal of coordinate `category` (1-based) of a Dirichlet vector:
// Beta(alpha_i, sum of the other alphas).
BetaParams dirichlet_marginal(const DirichletParams& p, int category);

// Log-density at a point of the probability simplex (coordinates positive,
// summing to 1 within 1e-9; otherwise InvalidInputError).
double dirichlet_log_pdf(std::span<const double> x, const DirichletParams& p);

}  // namespace incomenet::stats
