// Command-line pipeline: synth -> ingest -> homophily / infer / evaluate.
// Every command prints a JSON report (with its effective config) to stdout
// and exits 0 on success, 2 on usage/format/config errors, 3 on statistical
// degeneracy.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "incomenet/csv.hpp"
#include "incomenet/evaluation.hpp"
#include "incomenet/graph.hpp"
#include "incomenet/ingest.hpp"
#include "incomenet/inference.hpp"
#include "incomenet/parallel.hpp"
#include "incomenet/stats.hpp"
#include "incomenet/synthgen.hpp"
#include "incomenet/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace incomenet;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;

struct CommonFlags {
    std::string schema = "binary";
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir;
};

CategorySchema schema_from_name(const std::string& name) {
    if (name == "binary") return CategorySchema::binary();
    if (name == "five") return CategorySchema::five_class();
    throw ConfigError("unknown schema: " + name);
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool need_out) {
    cmd->add_option("--schema", flags.schema, "Income category schema")
        ->check(CLI::IsMember({"binary", "five"}))
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "Random seed")->capture_default_str();
    cmd->add_option("--threads", flags.threads, "Worker threads for per-user scoring")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    auto* out = cmd->add_option("--out", flags.out_dir, "Output directory");
    if (need_out) out->required();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out << text;
}

void emit(const json& report, const CommonFlags& flags, const std::string& filename) {
    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!flags.out_dir.empty()) {
        fs::create_directories(flags.out_dir);
        write_text(fs::path(flags.out_dir) / filename, text);
    }
}

CommGraph load_graph(const std::string& snapshot_dir, const CategorySchema& schema) {
    const fs::path dir(snapshot_dir);
    return load_snapshot((dir / "nodes.csv").string(), (dir / "edges.csv").string(), schema);
}

json report_base(const std::string& command, const json& config) {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["config"] = config;
    return j;
}

void write_roc_csv(const fs::path& path, const RocCurve& curve) {
    std::string text = "tau,fpr,tpr\n";
    for (const auto& p : curve.points) {
        text += csv::format_double(p.tau) + ',' + csv::format_double(p.fpr) + ',' +
                csv::format_double(p.tpr) + '\n';
    }
    write_text(path, text);
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const CommonFlags& flags, SynthConfig cfg) {
    const auto schema = schema_from_name(flags.schema);
    cfg.seed = flags.seed;
    cfg.categories = schema.size();
    const auto summary = generate(cfg, schema, flags.out_dir);

    json config{{"schema", flags.schema},
                {"users", cfg.n_users},
                {"labeled_fraction", cfg.labeled_fraction},
                {"categories", cfg.categories},
                {"homophily", cfg.homophily},
                {"mean_degree", cfg.mean_degree},
                {"calls_per_edge", cfg.calls_per_edge_mean},
                {"income_mu", cfg.income_log_mean},
                {"income_sigma", cfg.income_log_sigma},
                {"seed", cfg.seed},
                {"out", flags.out_dir}};
    json report = report_base("synth", config);
    report["cdr_rows"] = summary.cdr_rows;
    report["bank_rows"] = summary.bank_rows;
    json per_cat = json::object();
    for (const auto& [cat, count] : summary.users_per_category) {
        per_cat[std::to_string(cat)] = count;
    }
    report["users_per_category"] = per_cat;
    emit(report, flags, "synth.json");
    return 0;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestFlags {
    std::string cdr_path;
    std::string bank_path;
    std::string anonymize_key;
    std::string report_path;
    std::string age_summary_path;
    std::string min_calls_mode = "total";
};

json rejection_json(const RejectionReport& r) {
    json j{{"rows", r.rows}, {"rejected", r.rejected}};
    json reasons = json::object();
    for (const auto& [reason, count] : r.reasons) reasons[reason] = count;
    j["reasons"] = reasons;
    return j;
}

int cmd_ingest(const CommonFlags& flags, const IngestFlags& opts, FilterConfig filter) {
    const auto schema = schema_from_name(flags.schema);
    filter.per_direction = opts.min_calls_mode == "each";
    filter.validate();

    std::ifstream cdr_in(opts.cdr_path, std::ios::binary);
    if (!cdr_in) throw FormatError("cannot open CDR file: " + opts.cdr_path);
    std::ifstream bank_in(opts.bank_path, std::ios::binary);
    if (!bank_in) throw FormatError("cannot open bank file: " + opts.bank_path);

    RejectionReport cdr_report, bank_report;
    auto records = parse_cdr(cdr_in, cdr_report, opts.anonymize_key);
    auto clients = parse_bank(bank_in, bank_report, opts.anonymize_key);

    auto data = join(std::move(records), std::move(clients));
    const auto matched = static_cast<std::int64_t>(data.matched_ids.size());

    FilterReport filter_report;
    data = apply_filters(std::move(data), filter, schema, filter_report);

    if (!opts.age_summary_path.empty()) {
        std::string text = "age_lo,age_hi,count,min,q1,median,q3,max\n";
        for (const auto& row : income_by_age_summary(data.clients)) {
            text += std::to_string(row.age_lo) + ',' + std::to_string(row.age_lo + 5) + ',' +
                    std::to_string(row.count) + ',' + csv::format_double(row.min) + ',' +
                    csv::format_double(row.q1) + ',' + csv::format_double(row.median) + ',' +
                    csv::format_double(row.q3) + ',' + csv::format_double(row.max) + '\n';
        }
        write_text(opts.age_summary_path, text);
    }

    const auto graph = build_graph(data, schema);
    fs::create_directories(flags.out_dir);
    save_snapshot(graph, (fs::path(flags.out_dir) / "nodes.csv").string(),
                  (fs::path(flags.out_dir) / "edges.csv").string());

    json config{{"schema", flags.schema},
                {"cdr", opts.cdr_path},
                {"bank", opts.bank_path},
                {"min_calls", filter.min_calls},
                {"min_calls_mode", opts.min_calls_mode},
                {"count_sms", filter.count_sms_in_degree},
                {"min_income", filter.min_income},
                {"top_cut", filter.top_percentile_cut},
                {"cascade", filter.cascade},
                {"anonymized", !opts.anonymize_key.empty()},
                {"out", flags.out_dir}};
    json report = report_base("ingest", config);
    report["cdr"] = rejection_json(cdr_report);
    report["bank"] = rejection_json(bank_report);
    report["matched_ids"] = matched;
    report["filters"] = {{"labeled_before", filter_report.labeled_before},
                         {"removed_low_income", filter_report.removed_low_income},
                         {"removed_top_percentile", filter_report.removed_top_percentile},
                         {"removed_low_degree", filter_report.removed_low_degree},
                         {"removed_orphaned_clients", filter_report.removed_orphaned_clients},
                         {"removed_records", filter_report.removed_records},
                         {"retained_records", filter_report.retained_records},
                         {"retained_clients", filter_report.retained_clients}};
    json per_cat = json::object();
    for (const auto& [cat, count] : filter_report.labeled_per_category) {
        per_cat[std::to_string(cat)] = count;
    }
    report["labeled_per_category"] = per_cat;
    report["nodes"] = graph.node_count();
    report["edges"] = graph.edge_count();
    report["calls"] = graph.total_calls();
    report["sms"] = graph.total_sms();

    if (!opts.report_path.empty()) write_text(opts.report_path, report.dump(2) + "\n");
    emit(report, flags, "ingest.json");
    return 0;
}

// ---------------------------------------------------------------------------
// homophily

int cmd_homophily(const CommonFlags& flags, const std::string& snapshot_dir, int permutations) {
    const auto schema = schema_from_name(flags.schema);
    const auto graph = load_graph(snapshot_dir, schema);

    // Income vector over labeled nodes; edges reference positions in it.
    std::vector<double> incomes;
    std::vector<std::uint32_t> labeled_slot(graph.node_count(), UINT32_MAX);
    for (NodeIndex u = 0; u < graph.node_count(); ++u) {
        if (graph.node(u).label) {
            labeled_slot[u] = static_cast<std::uint32_t>(incomes.size());
            incomes.push_back(*graph.node(u).avg_income);
        }
    }
    std::vector<stats::EdgeRef> edges;
    for (NodeIndex u = 0; u < graph.node_count(); ++u) {
        if (labeled_slot[u] == UINT32_MAX) continue;
        for (const auto& e : graph.out_edges(u)) {
            if (labeled_slot[e.to] == UINT32_MAX) continue;
            edges.push_back({labeled_slot[u], labeled_slot[e.to]});
        }
    }
    if (edges.size() < 2) {
        throw DegenerateInputError("need at least two edges with labeled endpoints");
    }

    const auto result =
        stats::permutation_test(edges, incomes, permutations, flags.seed, flags.threads);

    json config{{"schema", flags.schema},
                {"snapshot", snapshot_dir},
                {"permutations", permutations},
                {"seed", flags.seed},
                {"threads", flags.threads}};
    json report = report_base("homophily", config);
    report["labeled_edges"] = edges.size();
    report["r_s"] = result.r_observed;
    report["p_value"] = result.p_value;
    emit(report, flags, "homophily.json");
    return 0;
}

// ---------------------------------------------------------------------------
// infer

struct ModelFlags {
    std::string model = "beta";
    double tau = 0.4;
    double quantile = 0.05;
    double prior_strength = 1.0;
    bool include_sms = false;
    bool bidirectional = false;
    bool distinct_contacts = false;
    bool literal_alpha_order = false;
    int kfold = 0;
    int tau_grid = 101;

    CountingOptions counting() const {
        return CountingOptions{include_sms, bidirectional, distinct_contacts};
    }
    ClassifierConfig classifier() const {
        return ClassifierConfig{quantile, prior_strength, literal_alpha_order};
    }
    json to_json() const {
        return json{{"model", model},
                    {"tau", tau},
                    {"quantile", quantile},
                    {"prior_strength", prior_strength},
                    {"include_sms", include_sms},
                    {"bidirectional", bidirectional},
                    {"distinct_contacts", distinct_contacts},
                    {"literal_alpha_order", literal_alpha_order}};
    }
};

int cmd_infer(const CommonFlags& flags, const std::string& snapshot_dir, const ModelFlags& model) {
    const auto schema = schema_from_name(flags.schema);
    const auto graph = load_graph(snapshot_dir, schema);
    if (model.model == "beta" && schema.size() != 2) {
        throw ConfigError("the beta model needs the binary schema");
    }

    const auto counting = model.counting();
    const auto classifier = model.classifier();
    const auto q_set = inference_set(graph, counting);
    std::vector<char> in_q(graph.node_count(), 0);
    for (const auto u : q_set) in_q[u] = 1;

    struct Row {
        UserId user;
        std::string score;
        int predicted = 0;
        std::string true_label;
    };
    std::vector<Row> rows(q_set.size());
    parallel_for(q_set.size(), flags.threads, [&](std::size_t i) {
        const NodeIndex u = q_set[i];
        const auto counts = neighbor_counts(graph, u, {}, counting);
        Row row;
        row.user = graph.node(u).id;
        if (const auto& label = graph.node(u).label) row.true_label = std::to_string(*label);
        if (model.model == "beta") {
            const auto p = beta_classify(counts, model.tau, classifier);
            row.score = csv::format_double(p.score);
            row.predicted = p.predicted;
        } else if (model.model == "dirichlet") {
            const auto p = dirichlet_classify(counts, classifier);
            row.score = csv::format_double(p.scores[static_cast<std::size_t>(p.predicted - 1)]);
            row.predicted = p.predicted;
        } else if (model.model == "majority") {
            row.predicted = majority_vote(counts, flags.seed);
            const double share = static_cast<double>(
                                     counts.counts[static_cast<std::size_t>(row.predicted - 1)]) /
                                 static_cast<double>(counts.total());
            row.score = csv::format_double(share);
        } else {  // random
            row.predicted = random_baseline(schema.size(), row.user, flags.seed);
        }
        rows[i] = std::move(row);
    });

    fs::create_directories(flags.out_dir);
    std::string predictions = "user,score,predicted,true_label\n";
    for (const auto& row : rows) {
        predictions += row.user + ',' + row.score + ',' + std::to_string(row.predicted) + ',' +
                       row.true_label + '\n';
    }
    write_text(fs::path(flags.out_dir) / "predictions.csv", predictions);

    std::string uncovered_text;
    std::int64_t uncovered = 0;
    for (NodeIndex u = 0; u < graph.node_count(); ++u) {
        if (!in_q[u]) {
            uncovered_text += graph.node(u).id + '\n';
            ++uncovered;
        }
    }
    write_text(fs::path(flags.out_dir) / "uncovered.csv", uncovered_text);

    json config = model.to_json();
    config["schema"] = flags.schema;
    config["snapshot"] = snapshot_dir;
    config["seed"] = flags.seed;
    config["threads"] = flags.threads;
    config["out"] = flags.out_dir;
    json report = report_base("infer", config);
    report["predicted"] = rows.size();
    report["uncovered"] = uncovered;
    emit(report, flags, "infer.json");
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const CommonFlags& flags, const std::string& snapshot_dir,
                 const ModelFlags& model) {
    const auto schema = schema_from_name(flags.schema);
    const auto graph = load_graph(snapshot_dir, schema);

    std::string resolved = model.model;
    if (resolved == "auto") resolved = schema.size() == 2 ? "beta" : "dirichlet";
    if (resolved == "beta" && schema.size() != 2) {
        throw ConfigError("the beta model needs the binary schema");
    }
    if (resolved != "beta" && resolved != "dirichlet") {
        throw ConfigError("evaluate supports the beta and dirichlet models");
    }

    EvalOptions opts;
    opts.counting = model.counting();
    opts.classifier = model.classifier();
    opts.seed = flags.seed;
    opts.threads = flags.threads;

    std::vector<EvalSplit> splits;
    if (model.kfold > 0) {
        splits = kfold_splits(graph, model.kfold, flags.seed, opts.counting);
    } else {
        splits.push_back(transductive_split(graph, opts.counting));
    }
    const auto grid = uniform_tau_grid(model.tau_grid);

    json config = model.to_json();
    config["schema"] = flags.schema;
    config["snapshot"] = snapshot_dir;
    config["kfold"] = model.kfold;
    config["tau_grid"] = model.tau_grid;
    config["seed"] = flags.seed;
    config["threads"] = flags.threads;
    config["out"] = flags.out_dir;
    config["model"] = resolved;
    json report = report_base("evaluate", config);
    report["protocol"] = model.kfold > 0 ? "kfold" : "transductive";

    fs::create_directories(flags.out_dir);
    if (resolved == "beta") {
        const auto result = evaluate_binary(graph, splits, grid, opts);
        write_roc_csv(fs::path(flags.out_dir) / "roc.csv", result.roc);
        report["covered"] = result.covered;
        report["uncovered"] = result.uncovered;
        report["auc"] = result.auc;
        report["best_tau"] = result.best_tau;
        report["best_accuracy"] = result.best_accuracy;
        report["baselines"] = {{"random_accuracy", result.random_accuracy},
                               {"majority_accuracy", result.majority_accuracy}};
        report["roc_csv"] = "roc.csv";
    } else {
        const auto result = evaluate_multiclass(graph, splits, grid, opts);
        report["covered"] = result.covered;
        report["uncovered"] = result.uncovered;
        report["overall_accuracy"] = result.overall_accuracy;
        json aucs = json::array();
        json files = json::array();
        for (std::size_t i = 0; i < result.per_category.size(); ++i) {
            const auto& curve = result.per_category[i];
            const std::string name = "roc_cat" + std::to_string(i + 1) + ".csv";
            if (curve.defined) {
                write_roc_csv(fs::path(flags.out_dir) / name, curve);
                aucs.push_back(result.per_category_auc[i]);
                files.push_back(name);
            } else {
                aucs.push_back(nullptr);
                files.push_back(nullptr);
            }
        }
        report["per_category_auc"] = aucs;
        report["roc_csv"] = files;
    }
    emit(report, flags, "report.json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Income-category inference over communication graphs"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // synth
    CommonFlags synth_common;
    SynthConfig synth_cfg;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic CDR/bank dataset");
    add_common(synth, synth_common, /*need_out=*/true);
    synth->add_option("--users", synth_cfg.n_users)->capture_default_str();
    synth->add_option("--labeled-fraction", synth_cfg.labeled_fraction)->capture_default_str();
    synth->add_option("--homophily", synth_cfg.homophily)->capture_default_str();
    synth->add_option("--mean-degree", synth_cfg.mean_degree)->capture_default_str();
    synth->add_option("--calls-per-edge", synth_cfg.calls_per_edge_mean)->capture_default_str();
    synth->add_option("--income-mu", synth_cfg.income_log_mean)->capture_default_str();
    synth->add_option("--income-sigma", synth_cfg.income_log_sigma)->capture_default_str();

    // ingest
    CommonFlags ingest_common;
    IngestFlags ingest_flags;
    FilterConfig filter_cfg;
    auto* ingest = app.add_subcommand("ingest", "Parse, join, filter and snapshot a graph");
    add_common(ingest, ingest_common, /*need_out=*/true);
    ingest->add_option("--cdr", ingest_flags.cdr_path, "CDR CSV path")->required();
    ingest->add_option("--bank", ingest_flags.bank_path, "Bank CSV path")->required();
    ingest->add_option("--min-calls", filter_cfg.min_calls)->capture_default_str();
    ingest->add_option("--min-calls-mode", ingest_flags.min_calls_mode)
        ->check(CLI::IsMember({"total", "each"}))
        ->capture_default_str();
    ingest->add_flag("--count-sms", filter_cfg.count_sms_in_degree,
                     "Count SMS events toward the degree rule");
    ingest->add_option("--min-income", filter_cfg.min_income)->capture_default_str();
    ingest->add_option("--top-cut", filter_cfg.top_percentile_cut)->capture_default_str();
    ingest->add_flag("--cascade", filter_cfg.cascade, "Iterate the degree rule to a fixpoint");
    ingest->add_option("--anonymize-key", ingest_flags.anonymize_key,
                       "Hash raw phone numbers with this key (omit for pre-anonymized input)");
    ingest->add_option("--report", ingest_flags.report_path, "Also write the report here");
    ingest->add_option("--age-summary", ingest_flags.age_summary_path,
                       "Write the income-by-age quartile table here");

    // homophily
    CommonFlags hom_common;
    std::string hom_snapshot;
    int permutations = 1000;
    auto* hom = app.add_subcommand("homophily", "Spearman correlation and permutation test");
    add_common(hom, hom_common, /*need_out=*/false);
    hom->add_option("--snapshot", hom_snapshot, "Snapshot directory")->required();
    hom->add_option("--permutations", permutations)
        ->check(CLI::Range(1, 10000000))
        ->capture_default_str();

    // infer
    CommonFlags infer_common;
    std::string infer_snapshot;
    ModelFlags infer_model;
    auto* infer = app.add_subcommand("infer", "Write predictions for the inference set");
    add_common(infer, infer_common, /*need_out=*/true);
    infer->add_option("--snapshot", infer_snapshot, "Snapshot directory")->required();
    infer->add_option("--model", infer_model.model)
        ->check(CLI::IsMember({"beta", "dirichlet", "majority", "random"}))
        ->capture_default_str();
    infer->add_option("--tau", infer_model.tau)->capture_default_str();
    infer->add_option("--quantile", infer_model.quantile)->capture_default_str();
    infer->add_option("--prior-strength", infer_model.prior_strength)->capture_default_str();
    infer->add_flag("--include-sms", infer_model.include_sms);
    infer->add_flag("--bidirectional", infer_model.bidirectional);
    infer->add_flag("--distinct-contacts", infer_model.distinct_contacts);
    infer->add_flag("--literal-alpha-order", infer_model.literal_alpha_order);

    // evaluate
    CommonFlags eval_common;
    std::string eval_snapshot;
    ModelFlags eval_model;
    eval_model.model = "auto";
    auto* evaluate = app.add_subcommand("evaluate", "ROC / accuracy report with baselines");
    add_common(evaluate, eval_common, /*need_out=*/true);
    evaluate->add_option("--snapshot", eval_snapshot, "Snapshot directory")->required();
    evaluate->add_option("--model", eval_model.model)
        ->check(CLI::IsMember({"auto", "beta", "dirichlet"}))
        ->capture_default_str();
    evaluate->add_option("--quantile", eval_model.quantile)->capture_default_str();
    evaluate->add_option("--prior-strength", eval_model.prior_strength)->capture_default_str();
    evaluate->add_option("--kfold", eval_model.kfold, "K-fold cross-validation (0 = transductive)")
        ->check(CLI::Range(0, 1000))
        ->capture_default_str();
    evaluate->add_option("--tau-grid", eval_model.tau_grid, "Threshold grid size for reports")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    evaluate->add_flag("--include-sms", eval_model.include_sms);
    evaluate->add_flag("--bidirectional", eval_model.bidirectional);
    evaluate->add_flag("--distinct-contacts", eval_model.distinct_contacts);
    evaluate->add_flag("--literal-alpha-order", eval_model.literal_alpha_order);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_common, synth_cfg);
        if (ingest->parsed()) return cmd_ingest(ingest_common, ingest_flags, filter_cfg);
        if (hom->parsed()) return cmd_homophily(hom_common, hom_snapshot, permutations);
        if (infer->parsed()) return cmd_infer(infer_common, infer_snapshot, infer_model);
        if (evaluate->parsed()) return cmd_evaluate(eval_common, eval_snapshot, eval_model);
    } catch (const DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
