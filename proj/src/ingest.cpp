#include "incomenet/ingest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "incomenet/csv.hpp"

namespace incomenet {

void FilterConfig::validate() const {
    if (min_calls < 0) throw ConfigError("min_calls must be >= 0");
    if (!(top_percentile_cut >= 0.0 && top_percentile_cut < 1.0)) {
        throw ConfigError("top_percentile_cut must lie in [0, 1)");
    }
    if (!(min_income >= 0.0) || !std::isfinite(min_income)) {
        throw ConfigError("min_income must be >= 0");
    }
}

UserId anonymize(const std::string& raw_phone, const std::string& key) {
    if (raw_phone.empty()) throw InvalidInputError("cannot anonymize an empty phone number");

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw NumericError("digest context allocation failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, key.data(), key.size());
    EVP_DigestUpdate(ctx, ":", 1);
    EVP_DigestUpdate(ctx, raw_phone.data(), raw_phone.size());
    EVP_DigestFinal_ex(ctx, digest, &digest_len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    UserId out;
    out.reserve(16);
    for (int i = 0; i < 8; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0f]);
    }
    return out;
}

namespace {

void check_header(std::istream& in, const char* expected, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError(std::string(what) + ": empty input, expected header '" + expected + "'");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) {
        throw FormatError(std::string(what) + ": bad header '" + line + "', expected '" +
                          expected + "'");
    }
}

}  // namespace

std::vector<CdrRecord> parse_cdr(std::istream& in, RejectionReport& report,
                                 const std::string& key) {
    check_header(in, "origin,destination,timestamp,kind,duration,lat,lon", "cdr");

    std::vector<CdrRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        ++report.rows;
        const auto f = csv::split(line);
        if (f.size() != 7) {
            report.reject("bad_column_count");
            continue;
        }
        CdrRecord rec;
        if (f[0].empty() || f[1].empty()) {
            report.reject("empty_id");
            continue;
        }
        rec.origin = key.empty() ? UserId(f[0]) : anonymize(std::string(f[0]), key);
        rec.destination = key.empty() ? UserId(f[1]) : anonymize(std::string(f[1]), key);
        if (rec.origin == rec.destination) {
            report.reject("self_call");
            continue;
        }
        if (!csv::parse_int64(f[2], rec.timestamp)) {
            report.reject("bad_timestamp");
            continue;
        }
        if (f[3] == "voice") {
            rec.kind = CdrKind::voice;
        } else if (f[3] == "sms") {
            rec.kind = CdrKind::sms;
        } else {
            report.reject("bad_kind");
            continue;
        }
        if (!csv::parse_int64(f[4], rec.duration) || rec.duration < 0) {
            report.reject("bad_duration");
            continue;
        }
        if (rec.kind == CdrKind::sms && rec.duration != 0) {
            report.reject("sms_with_duration");
            continue;
        }
        if (f[5].empty() != f[6].empty()) {
            report.reject("partial_coordinates");
            continue;
        }
        if (!f[5].empty()) {
            Coordinates c;
            if (!csv::parse_double(f[5], c.lat) || !csv::parse_double(f[6], c.lon)) {
                report.reject("bad_coordinates");
                continue;
            }
            rec.coords = c;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<BankClient> parse_bank(std::istream& in, RejectionReport& report,
                                   const std::string& key) {
    check_header(in, "phone,s0,s1,s2,s3,s4,s5,age", "bank");

    std::vector<BankClient> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        ++report.rows;
        const auto f = csv::split(line);
        if (f.size() != 8) {
            report.reject("bad_column_count");
            continue;
        }
        if (f[0].empty()) {
            report.reject("empty_id");
            continue;
        }
        BankClient client;
        client.phone = key.empty() ? UserId(f[0]) : anonymize(std::string(f[0]), key);
        bool ok = true;
        double sum = 0.0;
        for (int i = 0; i < 6; ++i) {
            double v = 0.0;
            if (!csv::parse_double(f[1 + i], v) || !std::isfinite(v) || v < 0.0) {
                ok = false;
                break;
            }
            client.monthly_incomes[static_cast<std::size_t>(i)] = v;
            sum += v;
        }
        if (!ok) {
            report.reject("bad_income");
            continue;
        }
        client.avg_income = sum / 6.0;
        if (!f[7].empty()) {
            std::int64_t age = 0;
            if (!csv::parse_int64(f[7], age) || age < 0 || age > 150) {
                report.reject("bad_age");
                continue;
            }
            client.age = static_cast<int>(age);
        }
        out.push_back(std::move(client));
    }
    return out;
}

JoinedDataset join(std::vector<CdrRecord> cdrs, std::vector<BankClient> clients) {
    std::unordered_set<UserId> endpoints;
    endpoints.reserve(cdrs.size() * 2);
    for (const auto& rec : cdrs) {
        endpoints.insert(rec.origin);
        endpoints.insert(rec.destination);
    }

    std::unordered_set<UserId> seen_phones;
    std::vector<UserId> duplicates;
    for (const auto& c : clients) {
        if (!seen_phones.insert(c.phone).second) duplicates.push_back(c.phone);
    }
    if (!duplicates.empty()) {
        std::sort(duplicates.begin(), duplicates.end());
        duplicates.erase(std::unique(duplicates.begin(), duplicates.end()), duplicates.end());
        std::ostringstream msg;
        msg << "duplicate bank phones (income would be ambiguous):";
        for (const auto& d : duplicates) msg << ' ' << d;
        throw InvalidInputError(msg.str());
    }

    JoinedDataset out;
    out.records = std::move(cdrs);
    for (auto& c : clients) {
        if (endpoints.count(c.phone) != 0) {
            out.matched_ids.insert(c.phone);
            out.clients.push_back(std::move(c));
        }
    }
    return out;
}

namespace {

// Nearest-rank upper quantile: smallest income value at cumulative rank
// ceil((1 - cut) * n). Users strictly above it form the top cut, so with
// distinct incomes exactly floor(cut * n) users are removed and ties at the
// threshold are kept.
double top_cut_threshold(std::vector<double> incomes, double cut) {
    const auto n = incomes.size();
    std::sort(incomes.begin(), incomes.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil((1.0 - cut) * static_cast<double>(n)));
    if (rank == 0) return -std::numeric_limits<double>::infinity();
    if (rank >= n) return std::numeric_limits<double>::infinity();
    return incomes[rank - 1];
}

struct DegreeCount {
    std::int64_t in = 0;
    std::int64_t out = 0;
};

}  // namespace

JoinedDataset apply_filters(JoinedDataset data, const FilterConfig& cfg,
                            const CategorySchema& schema, FilterReport& report) {
    cfg.validate();
    report.labeled_before = static_cast<std::int64_t>(data.clients.size());

    std::unordered_set<UserId> removed;

    // (a) income floor on labeled users
    for (const auto& c : data.clients) {
        if (c.avg_income < cfg.min_income) {
            removed.insert(c.phone);
            ++report.removed_low_income;
        }
    }

    // (b) top-percentile cut over labeled users surviving (a)
    if (cfg.top_percentile_cut > 0.0) {
        std::vector<double> incomes;
        incomes.reserve(data.clients.size());
        for (const auto& c : data.clients) {
            if (removed.count(c.phone) == 0) incomes.push_back(c.avg_income);
        }
        if (!incomes.empty()) {
            const double threshold = top_cut_threshold(std::move(incomes), cfg.top_percentile_cut);
            for (const auto& c : data.clients) {
                if (removed.count(c.phone) == 0 && c.avg_income > threshold) {
                    removed.insert(c.phone);
                    ++report.removed_top_percentile;
                }
            }
        }
    }

    const std::int64_t records_before = static_cast<std::int64_t>(data.records.size());
    auto drop_records_of_removed = [&]() {
        std::erase_if(data.records, [&](const CdrRecord& r) {
            return removed.count(r.origin) != 0 || removed.count(r.destination) != 0;
        });
    };
    drop_records_of_removed();

    // (c) degree rule on the records surviving (a) and (b); evaluated in a
    // single pass unless cascading to a fixpoint was requested
    for (;;) {
        std::unordered_map<UserId, DegreeCount> degrees;
        for (const auto& r : data.records) {
            if (r.kind == CdrKind::sms && !cfg.count_sms_in_degree) continue;
            ++degrees[r.origin].out;
            ++degrees[r.destination].in;
        }
        std::int64_t removed_now = 0;
        auto survives = [&](const UserId& id) {
            const auto it = degrees.find(id);
            const DegreeCount d = (it == degrees.end()) ? DegreeCount{} : it->second;
            if (cfg.per_direction) return d.in > cfg.min_calls && d.out > cfg.min_calls;
            return d.in + d.out > cfg.min_calls;
        };
        std::unordered_set<UserId> all_users;
        for (const auto& r : data.records) {
            all_users.insert(r.origin);
            all_users.insert(r.destination);
        }
        for (const auto& id : all_users) {
            if (!survives(id)) {
                removed.insert(id);
                ++removed_now;
            }
        }
        report.removed_low_degree += removed_now;
        drop_records_of_removed();
        if (!cfg.cascade || removed_now == 0) break;
    }

    // Consistency: clients whose records all disappeared are orphaned.
    std::unordered_set<UserId> endpoints;
    for (const auto& r : data.records) {
        endpoints.insert(r.origin);
        endpoints.insert(r.destination);
    }
    std::erase_if(data.clients, [&](const BankClient& c) {
        if (removed.count(c.phone) != 0) return true;
        if (endpoints.count(c.phone) == 0) {
            ++report.removed_orphaned_clients;
            return true;
        }
        return false;
    });
    std::erase_if(data.matched_ids, [&](const UserId& id) {
        return removed.count(id) != 0 || endpoints.count(id) == 0;
    });

    report.removed_records = records_before - static_cast<std::int64_t>(data.records.size());
    report.retained_records = static_cast<std::int64_t>(data.records.size());
    report.retained_clients = static_cast<std::int64_t>(data.clients.size());
    for (const auto& c : data.clients) {
        if (auto cat = categorize(c.avg_income, schema)) ++report.labeled_per_category[*cat];
    }
    return data;
}

namespace {

// Linear interpolation between closest ranks (the common spreadsheet rule).
double quantile_sorted(const std::vector<double>& v, double p) {
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<AgeBinSummary> income_by_age_summary(const std::vector<BankClient>& clients) {
    std::map<int, std::vector<double>> bins;
    for (const auto& c : clients) {
        if (!c.age) continue;
        const int lo = (*c.age / 5) * 5;
        bins[lo].push_back(c.avg_income);
    }
    std::vector<AgeBinSummary> out;
    out.reserve(bins.size());
    for (auto& [lo, incomes] : bins) {
        std::sort(incomes.begin(), incomes.end());
        AgeBinSummary row;
        row.age_lo = lo;
        row.count = static_cast<std::int64_t>(incomes.size());
        row.min = incomes.front();
        row.q1 = quantile_sorted(incomes, 0.25);
        row.median = quantile_sorted(incomes, 0.5);
        row.q3 = quantile_sorted(incomes, 0.75);
        row.max = incomes.back();
        out.push_back(row);
    }
    return out;
}

}  // namespace incomenet
