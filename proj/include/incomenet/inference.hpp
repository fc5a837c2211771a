#pragma once

#include <cstdint>
#include <vector>

#include "incomenet/graph.hpp"
#include "incomenet/stats.hpp"

namespace incomenet {

struct ClassifierConfig {
    double quantile = 0.05;         // lower posterior quantile used as the score
    double prior_strength = 1.0;    // added to every count (uniform prior)
    bool literal_alpha_order = false;  // feed the low-income count to alpha
};

struct BinaryPrediction {
    UserId user;
    double score = 0.0;  // lower quantile of the posterior high-income probability
    int predicted = 1;   // 2 iff score > threshold
    double threshold = 0.0;
};

struct MulticlassPrediction {
    UserId user;
    std::vector<double> scores;  // lower quantile per category
    int predicted = 1;           // argmax of scores, lowest index on ties
};

// Posterior lower-quantile score for the high-income category of a binary
// schema: Beta(high_count + prior, low_count + prior) evaluated at the
// configured quantile. Requires at least one labeled event.
BinaryPrediction beta_classify(const NeighborCounts& counts, double tau,
                               const ClassifierConfig& cfg = {});

// Multiclass analogue: for each category, the lower quantile of the Beta
// marginal of the Dirichlet posterior over category probabilities.
MulticlassPrediction dirichlet_classify(const NeighborCounts& counts,
                                        const ClassifierConfig& cfg = {});

// The score of one category, used as a thresholdable one-vs-rest statistic.
double one_vs_rest_score(const NeighborCounts& counts, int category,
                         const ClassifierConfig& cfg = {});

// Category with the most events; ties resolved uniformly at random,
// deterministically per (user, seed).
int majority_vote(const NeighborCounts& counts, std::uint64_t seed);

// Uniform category draw, deterministic per (user, seed).
int random_baseline(int categories, const UserId& user, std::uint64_t seed);

}  // namespace incomenet
