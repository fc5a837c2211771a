#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "incomenet/graph.hpp"
#include "incomenet/types.hpp"

namespace incomenet {

// Settings for the planted-partition dataset generator. For each directed
// edge slot the callee is drawn from the caller's true income category with
// probability `homophily`, otherwise uniformly from all users.
struct SynthConfig {
    int n_users = 10000;
    double labeled_fraction = 0.5;
    int categories = 2;           // must match the schema passed to generate()
    double homophily = 0.5;       // h in [0, 1]
    double mean_degree = 10.0;    // expected distinct callees per user
    double calls_per_edge_mean = 3.0;
    double income_log_mean = 5.8289456176102075;  // ln(340): median splits the binary schema
    double income_log_sigma = 1.0;
    std::uint64_t seed = 1;

    void validate(const CategorySchema& schema) const;
};

struct SynthSummary {
    std::int64_t cdr_rows = 0;
    std::int64_t bank_rows = 0;
    std::map<int, std::int64_t> users_per_category;  // key 0 = below the schema floor
};

// Writes cdr.csv, bank.csv and truth.csv into out_dir (the exact schemas
// the ingestion layer reads; truth.csv is user,category,income with
// category 0 for users below the schema floor). Byte-identical output for
// identical configs.
SynthSummary generate(const SynthConfig& cfg, const CategorySchema& schema,
                      const std::string& out_dir);

// Spearman correlation between the incomes at the endpoints of every edge
// whose two endpoints are labeled; the knob-to-correlation readout used to
// calibrate `homophily`.
double measured_homophily(const CommGraph& g);

}  // namespace incomenet
