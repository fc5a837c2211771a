#include "incomenet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "incomenet/csv.hpp"
#include "incomenet/rng.hpp"
#include "incomenet/stats.hpp"

namespace incomenet {

void SynthConfig::validate(const CategorySchema& schema) const {
    if (n_users < 10) throw ConfigError("generator needs at least 10 users");
    if (!(labeled_fraction >= 0.0 && labeled_fraction <= 1.0)) {
        throw ConfigError("labeled_fraction must lie in [0, 1]");
    }
    if (categories != schema.size()) {
        throw ConfigError("config categories must match the schema size");
    }
    if (!(homophily >= 0.0 && homophily <= 1.0)) {
        throw ConfigError("homophily must lie in [0, 1]");
    }
    if (!(mean_degree > 0.0) || mean_degree >= static_cast<double>(n_users)) {
        throw ConfigError("mean_degree must be positive and below n_users");
    }
    if (!(calls_per_edge_mean >= 1.0)) {
        throw ConfigError("calls_per_edge_mean must be >= 1");
    }
    if (!(income_log_sigma > 0.0)) throw ConfigError("income_log_sigma must be positive");
}

namespace {

std::string hex_token(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf, 16);
}

std::string money(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

double parse_money(const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
}

int truth_category(double income, const CategorySchema& schema) {
    const auto cat = categorize(income, schema);
    return cat ? *cat : 0;
}

// Six monthly values jittered around the drawn income, then adjusted so the
// mean recomputed from the written cent-rounded strings lands in the same
// category as the drawn income (otherwise ground truth would drift).
std::array<std::string, 6> monthly_values(std::mt19937_64& eng, double income,
                                          const CategorySchema& schema) {
    const int target = truth_category(income, schema);
    std::array<double, 6> vals;
    for (double& v : vals) v = income * (0.9 + 0.2 * rng::uniform01(eng));

    for (int attempt = 0; attempt < 64; ++attempt) {
        std::array<std::string, 6> text;
        double written_sum = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            text[i] = money(std::max(0.0, vals[i]));
            written_sum += parse_money(text[i]);
        }
        const double written_avg = written_sum / 6.0;
        if (truth_category(written_avg, schema) == target) return text;
        // Pull the values toward the drawn income and retry.
        const double scale = income / std::max(written_avg, 1e-9);
        for (double& v : vals) v *= scale;
    }
    // Degenerate jitter; fall back to six exact copies.
    std::array<std::string, 6> text;
    for (auto& t : text) t = money(income);
    return text;
}

}  // namespace

SynthSummary generate(const SynthConfig& cfg, const CategorySchema& schema,
                      const std::string& out_dir) {
    cfg.validate(schema);
    std::filesystem::create_directories(out_dir);

    const auto n = static_cast<std::size_t>(cfg.n_users);
    auto eng = rng::make_engine(cfg.seed, 0);

    // Distinct fixed-length ids.
    std::vector<UserId> ids(n);
    std::unordered_set<UserId> taken;
    taken.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        UserId id;
        do {
            id = hex_token(eng());
        } while (!taken.insert(id).second);
        ids[i] = std::move(id);
    }

    std::vector<double> incomes(n);
    std::vector<int> category(n);
    std::vector<std::vector<std::uint32_t>> members(
        static_cast<std::size_t>(schema.size()) + 1);
    SynthSummary summary;
    for (std::size_t i = 0; i < n; ++i) {
        incomes[i] = rng::lognormal(eng, cfg.income_log_mean, cfg.income_log_sigma);
        category[i] = truth_category(incomes[i], schema);
        members[static_cast<std::size_t>(category[i])].push_back(
            static_cast<std::uint32_t>(i));
        ++summary.users_per_category[category[i]];
    }

    // Directed planted-partition edges with per-edge event counts.
    const std::int64_t t0 = 1420070400;         // arbitrary epoch start
    const std::int64_t window = 90LL * 86400;   // three months
    std::ofstream cdr(out_dir + "/cdr.csv", std::ios::binary);
    if (!cdr) throw FormatError("cannot open for writing: " + out_dir + "/cdr.csv");
    cdr << "origin,destination,timestamp,kind,duration,lat,lon\n";

    auto emit_row = [&](std::size_t o, std::uint32_t d, CdrKind kind) {
        const std::int64_t ts = t0 + static_cast<std::int64_t>(
                                         rng::uniform_below(eng, static_cast<std::uint64_t>(window)));
        const std::int64_t duration =
            kind == CdrKind::voice
                ? 10 + static_cast<std::int64_t>(rng::uniform_below(eng, 590))
                : 0;
        cdr << ids[o] << ',' << ids[d] << ',' << ts << ','
            << (kind == CdrKind::voice ? "voice" : "sms") << ',' << duration << ',';
        if (rng::uniform01(eng) < 0.1) {
            const double lat = -34.7 + 0.2 * rng::uniform01(eng);
            const double lon = -58.5 + 0.2 * rng::uniform01(eng);
            cdr << csv::format_double(lat) << ',' << csv::format_double(lon);
        } else {
            cdr << ',';
        }
        cdr << '\n';
        ++summary.cdr_rows;
    };

    for (std::size_t u = 0; u < n; ++u) {
        const int degree = rng::poisson(eng, cfg.mean_degree);
        const auto& same = members[static_cast<std::size_t>(category[u])];
        for (int s = 0; s < degree; ++s) {
            std::uint32_t callee;
            int guard = 0;
            do {
                const bool within = category[u] != 0 && same.size() > 1 &&
                                    rng::uniform01(eng) < cfg.homophily;
                callee = within ? same[rng::uniform_below(eng, same.size())]
                                : static_cast<std::uint32_t>(rng::uniform_below(eng, n));
            } while (callee == u && ++guard < 64);
            if (callee == u) continue;

            const std::int64_t calls = rng::geometric_from_mean(eng, cfg.calls_per_edge_mean);
            for (std::int64_t c = 0; c < calls; ++c) emit_row(u, callee, CdrKind::voice);
            if (rng::uniform01(eng) < 0.2) {
                const int sms = 1 + rng::poisson(eng, 1.0);
                for (int c = 0; c < sms; ++c) emit_row(u, callee, CdrKind::sms);
            }
        }
    }
    cdr.close();

    // Labeled subset.
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    rng::shuffle(eng, order);
    const auto labeled_count =
        static_cast<std::size_t>(std::floor(cfg.labeled_fraction * static_cast<double>(n)));
    std::vector<std::uint32_t> labeled(order.begin(),
                                       order.begin() + static_cast<std::ptrdiff_t>(labeled_count));
    std::sort(labeled.begin(), labeled.end());

    std::ofstream bank(out_dir + "/bank.csv", std::ios::binary);
    if (!bank) throw FormatError("cannot open for writing: " + out_dir + "/bank.csv");
    bank << "phone,s0,s1,s2,s3,s4,s5,age\n";
    for (const std::uint32_t i : labeled) {
        const auto vals = monthly_values(eng, incomes[i], schema);
        bank << ids[i];
        for (const auto& v : vals) bank << ',' << v;
        bank << ',';
        if (rng::uniform01(eng) < 0.7) {
            bank << 18 + rng::uniform_below(eng, 63);  // ages 18..80
        }
        bank << '\n';
        ++summary.bank_rows;
    }
    bank.close();

    std::ofstream truth(out_dir + "/truth.csv", std::ios::binary);
    if (!truth) throw FormatError("cannot open for writing: " + out_dir + "/truth.csv");
    truth << "user,category,income\n";
    for (std::size_t i = 0; i < n; ++i) {
        truth << ids[i] << ',' << category[i] << ',' << money(incomes[i]) << '\n';
    }
    return summary;
}

double measured_homophily(const CommGraph& g) {
    std::vector<double> origin_incomes;
    std::vector<double> dest_incomes;
    for (NodeIndex u = 0; u < g.node_count(); ++u) {
        if (!g.node(u).label) continue;
        for (const auto& e : g.out_edges(u)) {
            const auto& dest = g.node(e.to);
            if (!dest.label) continue;
            origin_incomes.push_back(*g.node(u).avg_income);
            dest_incomes.push_back(*dest.avg_income);
        }
    }
    return stats::spearman(origin_incomes, dest_incomes);
}

}  // namespace incomenet
