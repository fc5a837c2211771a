#include "incomenet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "incomenet/parallel.hpp"
#include "incomenet/rng.hpp"

namespace incomenet {

ConfusionStats confusion(std::span<const LabeledPrediction> preds) {
    ConfusionStats s;
    for (const auto& p : preds) {
        const bool actual_pos = p.truth == 2;
        const bool predicted_pos = p.predicted == 2;
        if (actual_pos && predicted_pos) ++s.tp;
        if (!actual_pos && predicted_pos) ++s.fp;
        if (!actual_pos && !predicted_pos) ++s.tn;
        if (actual_pos && !predicted_pos) ++s.fn;
    }
    const std::int64_t positives = s.tp + s.fn;
    const std::int64_t negatives = s.fp + s.tn;
    if (positives == 0 || negatives == 0) {
        throw UndefinedRateError("confusion rates need at least one sample of each class");
    }
    s.tpr = static_cast<double>(s.tp) / static_cast<double>(positives);
    s.fpr = static_cast<double>(s.fp) / static_cast<double>(negatives);
    s.accuracy =
        static_cast<double>(s.tp + s.tn) / static_cast<double>(positives + negatives);
    return s;
}

RocCurve roc_sweep(std::span<const ScoredSample> samples, int positive_category,
                   std::span<const double> tau_grid) {
    std::int64_t positives = 0;
    for (const auto& s : samples) positives += (s.truth == positive_category) ? 1 : 0;
    const std::int64_t negatives = static_cast<std::int64_t>(samples.size()) - positives;
    if (positives == 0 || negatives == 0) {
        throw UndefinedRateError("roc_sweep needs at least one positive and one negative");
    }

    // Sort scores ascending with a prefix count of positives, so each
    // threshold is answered with one binary search.
    std::vector<std::pair<double, int>> sorted(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sorted[i] = {samples[i].score, samples[i].truth == positive_category ? 1 : 0};
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::int64_t> pos_prefix(sorted.size() + 1, 0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        pos_prefix[i + 1] = pos_prefix[i] + sorted[i].second;
    }

    std::vector<double> taus;
    if (tau_grid.empty()) {
        taus.reserve(sorted.size() + 2);
        taus.push_back(0.0);
        taus.push_back(1.0);
        for (const auto& [score, is_pos] : sorted) taus.push_back(score);
    } else {
        taus.assign(tau_grid.begin(), tau_grid.end());
    }
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    RocCurve curve;
    curve.points.reserve(taus.size() + 2);
    for (const double tau : taus) {
        // Samples with score > tau are classified positive.
        const auto it = std::upper_bound(
            sorted.begin(), sorted.end(), tau,
            [](double t, const std::pair<double, int>& s) { return t < s.first; });
        const auto below = static_cast<std::size_t>(it - sorted.begin());
        const std::int64_t tp = positives - pos_prefix[below];
        const std::int64_t fp =
            static_cast<std::int64_t>(sorted.size() - below) - tp;
        curve.points.push_back({tau, static_cast<double>(fp) / static_cast<double>(negatives),
                                static_cast<double>(tp) / static_cast<double>(positives)});
    }

    // Anchor operating points: predict-none and predict-all.
    auto has_point = [&](double f, double t) {
        return std::any_of(curve.points.begin(), curve.points.end(),
                           [&](const RocPoint& p) { return p.fpr == f && p.tpr == t; });
    };
    if (!has_point(0.0, 0.0)) curve.points.push_back({1.0, 0.0, 0.0});
    if (!has_point(1.0, 1.0)) curve.points.push_back({0.0, 1.0, 1.0});

    std::sort(curve.points.begin(), curve.points.end(), [](const RocPoint& a, const RocPoint& b) {
        if (a.fpr != b.fpr) return a.fpr < b.fpr;
        return a.tpr < b.tpr;
    });

    double auc = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& lo = curve.points[i - 1];
        const auto& hi = curve.points[i];
        auc += (hi.fpr - lo.fpr) * 0.5 * (lo.tpr + hi.tpr);
    }
    curve.auc = auc;
    return curve;
}

EvalSplit transductive_split(const CommGraph& g, const CountingOptions& opts) {
    EvalSplit split;
    for (const NodeIndex u : inference_set(g, opts)) {
        if (g.node(u).label) split.test_users.push_back(u);
    }
    return split;
}

std::vector<EvalSplit> kfold_splits(const CommGraph& g, int folds, std::uint64_t seed,
                                    const CountingOptions& opts) {
    if (folds < 2) throw ConfigError("k-fold evaluation needs at least 2 folds");
    auto all = transductive_split(g, opts).test_users;
    auto eng = rng::make_engine(seed, 0x6f1d);
    rng::shuffle(eng, all);
    std::vector<EvalSplit> splits(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < all.size(); ++i) {
        splits[i % static_cast<std::size_t>(folds)].test_users.push_back(all[i]);
    }
    std::erase_if(splits, [](const EvalSplit& s) { return s.test_users.empty(); });
    for (auto& s : splits) std::sort(s.test_users.begin(), s.test_users.end());
    return splits;
}

namespace {

struct ScoredUser {
    NodeIndex node = 0;
    int truth = 1;
    std::vector<double> scores;        // one entry for binary, k for multiclass
    std::vector<std::int64_t> counts;  // masked neighbor counts (for baselines)
};

// Scores all test users of all splits under mutual masking. Slots for
// uncovered users stay empty. Deterministic for any thread count.
std::vector<std::optional<ScoredUser>> score_users(const CommGraph& g,
                                                   std::span<const EvalSplit> splits,
                                                   const EvalOptions& opts, bool multiclass) {
    std::vector<std::pair<NodeIndex, const EvalSplit*>> work;
    for (const auto& split : splits) {
        for (const NodeIndex u : split.test_users) work.emplace_back(u, &split);
    }
    std::vector<std::unordered_set<NodeIndex>> masks;
    masks.reserve(splits.size());
    for (const auto& split : splits) {
        masks.emplace_back(split.test_users.begin(), split.test_users.end());
    }
    std::unordered_map<const EvalSplit*, const std::unordered_set<NodeIndex>*> mask_of;
    for (std::size_t i = 0; i < splits.size(); ++i) mask_of[&splits[i]] = &masks[i];

    std::vector<std::optional<ScoredUser>> out(work.size());
    parallel_for(work.size(), opts.threads, [&](std::size_t i) {
        const auto [u, split] = work[i];
        const auto& label = g.node(u).label;
        if (!label) return;  // only labeled users can be evaluated
        const auto counts = neighbor_counts(g, u, *mask_of.at(split), opts.counting);
        if (counts.total() < 1) return;  // uncovered
        ScoredUser scored;
        scored.node = u;
        scored.truth = *label;
        scored.counts = counts.counts;
        if (multiclass) {
            scored.scores = dirichlet_classify(counts, opts.classifier).scores;
        } else {
            scored.scores = {beta_classify(counts, 0.0, opts.classifier).score};
        }
        out[i] = std::move(scored);
    });
    return out;
}

double accuracy_at_tau(const std::vector<ScoredSample>& samples, double tau) {
    std::int64_t correct = 0;
    for (const auto& s : samples) {
        const int predicted = s.score > tau ? 2 : 1;
        if (predicted == s.truth) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace

std::vector<double> uniform_tau_grid(int points) {
    if (points < 2) throw ConfigError("tau grid needs at least 2 points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return grid;
}

BinaryEvalReport evaluate_binary(const CommGraph& g, std::span<const EvalSplit> splits,
                                 std::span<const double> tau_grid, const EvalOptions& opts) {
    if (g.categories() != 2) {
        throw InvalidInputError("evaluate_binary needs a binary category schema");
    }
    const auto scored = score_users(g, splits, opts, /*multiclass=*/false);

    BinaryEvalReport report;
    std::vector<ScoredSample> samples;
    std::int64_t random_correct = 0;
    std::int64_t majority_correct = 0;
    for (const auto& maybe : scored) {
        if (!maybe) {
            ++report.uncovered;
            continue;
        }
        const auto& s = *maybe;
        samples.push_back({s.scores[0], s.truth});
        const auto& user = g.node(s.node).id;
        if (random_baseline(2, user, opts.seed) == s.truth) ++random_correct;
        NeighborCounts nc{user, s.counts};
        if (majority_vote(nc, opts.seed) == s.truth) ++majority_correct;
    }
    report.covered = static_cast<std::int64_t>(samples.size());
    if (samples.empty()) {
        throw UndefinedRateError("no covered test users; every neighbor label was masked");
    }

    report.roc = roc_sweep(samples, 2, tau_grid);
    report.auc = roc_sweep(samples, 2).auc;  // exact grid

    std::vector<double> grid(tau_grid.begin(), tau_grid.end());
    if (grid.empty()) grid = uniform_tau_grid(101);
    std::sort(grid.begin(), grid.end());
    report.best_tau = grid.front();
    report.best_accuracy = -1.0;
    for (const double tau : grid) {
        const double acc = accuracy_at_tau(samples, tau);
        if (acc > report.best_accuracy) {
            report.best_accuracy = acc;
            report.best_tau = tau;
        }
    }
    report.random_accuracy =
        static_cast<double>(random_correct) / static_cast<double>(report.covered);
    report.majority_accuracy =
        static_cast<double>(majority_correct) / static_cast<double>(report.covered);
    return report;
}

MulticlassEvalReport evaluate_multiclass(const CommGraph& g, std::span<const EvalSplit> splits,
                                         std::span<const double> tau_grid,
                                         const EvalOptions& opts) {
    const int k = g.categories();
    if (k < 2) throw InvalidInputError("evaluate_multiclass needs at least two categories");
    const auto scored = score_users(g, splits, opts, /*multiclass=*/true);

    MulticlassEvalReport report;
    std::vector<const ScoredUser*> covered;
    for (const auto& maybe : scored) {
        if (!maybe) {
            ++report.uncovered;
            continue;
        }
        covered.push_back(&*maybe);
    }
    report.covered = static_cast<std::int64_t>(covered.size());
    if (covered.empty()) {
        throw UndefinedRateError("no covered test users; every neighbor label was masked");
    }

    std::int64_t correct = 0;
    for (const ScoredUser* s : covered) {
        const auto best = std::max_element(s->scores.begin(), s->scores.end());
        const int predicted = static_cast<int>(best - s->scores.begin()) + 1;
        if (predicted == s->truth) ++correct;
    }
    report.overall_accuracy = static_cast<double>(correct) / static_cast<double>(report.covered);

    report.per_category.resize(static_cast<std::size_t>(k));
    report.per_category_auc.assign(static_cast<std::size_t>(k),
                                   std::numeric_limits<double>::quiet_NaN());
    for (int cat = 1; cat <= k; ++cat) {
        std::vector<ScoredSample> samples;
        samples.reserve(covered.size());
        for (const ScoredUser* s : covered) {
            samples.push_back({s->scores[static_cast<std::size_t>(cat - 1)], s->truth});
        }
        auto& curve = report.per_category[static_cast<std::size_t>(cat - 1)];
        try {
            curve = roc_sweep(samples, cat, tau_grid);
            report.per_category_auc[static_cast<std::size_t>(cat - 1)] =
                roc_sweep(samples, cat).auc;
        } catch (const UndefinedRateError&) {
            curve.defined = false;  // class absent from the split
            curve.auc = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return report;
}

}  // namespace incomenet
