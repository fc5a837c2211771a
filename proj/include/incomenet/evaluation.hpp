#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "incomenet/graph.hpp"
#include "incomenet/inference.hpp"

namespace incomenet {

struct RocPoint {
    double tau = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

// Threshold sweep; points sorted by FPR nondecreasing with the anchor
// operating points (0,0) and (1,1) always present, and auc equal to the
// trapezoidal integral of the stored points.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
    bool defined = true;
};

struct ConfusionStats {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    double tpr = 0.0, fpr = 0.0, accuracy = 0.0;
};

struct LabeledPrediction {
    int predicted = 1;
    int truth = 1;
};

// Binary confusion statistics; positives are the high-income category 2.
// Throws UndefinedRateError when either class is absent.
ConfusionStats confusion(std::span<const LabeledPrediction> preds);

struct ScoredSample {
    double score = 0.0;
    int truth = 1;
};

// ROC over the given thresholds (classify positive iff score > tau). An
// empty grid means all distinct scores plus {0, 1}, which yields the exact
// step curve whose trapezoidal area equals the rank-statistic AUC.
RocCurve roc_sweep(std::span<const ScoredSample> samples, int positive_category,
                   std::span<const double> tau_grid = {});

// A held-out evaluation split: labels of every test user are masked when
// computing any test user's neighbor counts.
struct EvalSplit {
    std::vector<NodeIndex> test_users;
};

struct EvalOptions {
    CountingOptions counting;
    ClassifierConfig classifier;
    std::uint64_t seed = 1;
    int threads = 1;
};

// The transductive split: every labeled user in the inference set is a test
// user, all masked simultaneously. With densely labeled graphs this leaves
// few unmasked labeled neighbors; prefer k-fold there.
EvalSplit transductive_split(const CommGraph& g, const CountingOptions& opts = {});

// Deterministic K-fold partition of the labeled inference set.
std::vector<EvalSplit> kfold_splits(const CommGraph& g, int folds, std::uint64_t seed,
                                    const CountingOptions& opts = {});

struct BinaryEvalReport {
    RocCurve roc;          // over the display grid passed by the caller
    double auc = 0.0;      // exact AUC from the all-distinct-scores grid
    double best_tau = 0.0;
    double best_accuracy = 0.0;
    double random_accuracy = 0.0;
    double majority_accuracy = 0.0;
    std::int64_t covered = 0;
    std::int64_t uncovered = 0;
};

// Scores every test user with the Beta classifier under mutual masking,
// sweeps tau for the ROC and the best accuracy, and runs both baselines on
// the same covered users.
BinaryEvalReport evaluate_binary(const CommGraph& g, std::span<const EvalSplit> splits,
                                 std::span<const double> tau_grid, const EvalOptions& opts = {});

struct MulticlassEvalReport {
    std::vector<RocCurve> per_category;   // display grid; defined=false when a class is absent
    std::vector<double> per_category_auc; // exact AUC per category (NaN when undefined)
    double overall_accuracy = 0.0;
    std::int64_t covered = 0;
    std::int64_t uncovered = 0;
};

// One-vs-rest ROC per category from the Dirichlet marginal scores, plus the
// overall argmax accuracy.
MulticlassEvalReport evaluate_multiclass(const CommGraph& g, std::span<const EvalSplit> splits,
                                         std::span<const double> tau_grid,
                                         const EvalOptions& opts = {});

// Evenly spaced thresholds over [0, 1] (the report/CSV display grid).
std::vector<double> uniform_tau_grid(int points);

}  // namespace incomenet
