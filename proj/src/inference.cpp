#include "incomenet/inference.hpp"

#include <algorithm>

#include "incomenet/rng.hpp"

namespace incomenet {

namespace {

void require_evidence(const NeighborCounts& counts) {
    if (counts.total() < 1) {
        throw InsufficientEvidenceError("user " + counts.user +
                                        " has no outgoing events to labeled users");
    }
}

std::vector<double> posterior_scores(const NeighborCounts& counts, const ClassifierConfig& cfg) {
    stats::DirichletParams posterior;
    posterior.alpha.reserve(counts.counts.size());
    for (const std::int64_t c : counts.counts) {
        posterior.alpha.push_back(static_cast<double>(c) + cfg.prior_strength);
    }
    std::vector<double> scores(posterior.alpha.size());
    for (int i = 1; i <= static_cast<int>(posterior.alpha.size()); ++i) {
        scores[static_cast<std::size_t>(i - 1)] =
            stats::beta_quantile(cfg.quantile, stats::dirichlet_marginal(posterior, i));
    }
    return scores;
}

}  // namespace

BinaryPrediction beta_classify(const NeighborCounts& counts, double tau,
                               const ClassifierConfig& cfg) {
    if (counts.counts.size() != 2) {
        throw InvalidInputError("beta_classify needs a binary category schema");
    }
    require_evidence(counts);
    const double low = static_cast<double>(counts.counts[0]) + cfg.prior_strength;
    const double high = static_cast<double>(counts.counts[1]) + cfg.prior_strength;
    // The Beta variable is the probability of the high-income category, so
    // the high-income count feeds the first parameter. The literal order
    // flips this for comparison experiments.
    const stats::BetaParams posterior =
        cfg.literal_alpha_order ? stats::BetaParams{low, high} : stats::BetaParams{high, low};

    BinaryPrediction out;
    out.user = counts.user;
    out.threshold = tau;
    out.score = stats::beta_quantile(cfg.quantile, posterior);
    out.predicted = out.score > tau ? 2 : 1;
    return out;
}

MulticlassPrediction dirichlet_classify(const NeighborCounts& counts,
                                        const ClassifierConfig& cfg) {
    if (counts.counts.size() < 2) {
        throw InvalidInputError("dirichlet_classify needs at least two categories");
    }
    require_evidence(counts);
    MulticlassPrediction out;
    out.user = counts.user;
    out.scores = posterior_scores(counts, cfg);
    const auto best = std::max_element(out.scores.begin(), out.scores.end());
    out.predicted = static_cast<int>(best - out.scores.begin()) + 1;
    return out;
}

double one_vs_rest_score(const NeighborCounts& counts, int category,
                         const ClassifierConfig& cfg) {
    require_evidence(counts);
    if (category < 1 || category > static_cast<int>(counts.counts.size())) {
        throw InvalidInputError("one_vs_rest_score category out of range");
    }
    stats::DirichletParams posterior;
    for (const std::int64_t c : counts.counts) {
        posterior.alpha.push_back(static_cast<double>(c) + cfg.prior_strength);
    }
    return stats::beta_quantile(cfg.quantile, stats::dirichlet_marginal(posterior, category));
}

int majority_vote(const NeighborCounts& counts, std::uint64_t seed) {
    require_evidence(counts);
    const std::int64_t top = *std::max_element(counts.counts.begin(), counts.counts.end());
    std::vector<int> tied;
    for (std::size_t i = 0; i < counts.counts.size(); ++i) {
        if (counts.counts[i] == top) tied.push_back(static_cast<int>(i) + 1);
    }
    if (tied.size() == 1) return tied.front();
    auto eng = rng::make_engine(seed, rng::fnv1a(counts.user));
    return tied[static_cast<std::size_t>(rng::uniform_below(eng, tied.size()))];
}

int random_baseline(int categories, const UserId& user, std::uint64_t seed) {
    if (categories < 1) throw InvalidInputError("random_baseline needs at least one category");
    auto eng = rng::make_engine(seed, rng::fnv1a(user));
    return static_cast<int>(rng::uniform_below(eng, static_cast<std::uint64_t>(categories))) + 1;
}

}  // namespace incomenet
