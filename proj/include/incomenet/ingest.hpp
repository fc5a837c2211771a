#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "incomenet/types.hpp"

namespace incomenet {

// Outlier filter settings. min_calls is a strict lower bound: users survive
// only with more than min_calls call events.
struct FilterConfig {
    std::int64_t min_calls = 5;
    double min_income = 54.0;
    double top_percentile_cut = 0.01;
    bool count_sms_in_degree = false;  // SMS events count toward the degree rule
    bool per_direction = false;        // require > min_calls in each direction
    bool cascade = false;              // iterate the degree rule to a fixpoint

    void validate() const;
};

// Inner-join result: all CDR records are retained (unlabeled telco users are
// the inference targets); bank clients not present in any CDR are dropped.
struct JoinedDataset {
    std::vector<CdrRecord> records;
    std::vector<BankClient> clients;
    std::unordered_set<UserId> matched_ids;
};

// Row-level parse problems, accumulated instead of aborting the stream.
struct RejectionReport {
    std::int64_t rows = 0;      // data rows seen (header excluded)
    std::int64_t rejected = 0;  // rows dropped
    std::map<std::string, std::int64_t> reasons;

    void reject(const std::string& reason) {
        ++rejected;
        ++reasons[reason];
    }
};

struct FilterReport {
    std::int64_t labeled_before = 0;
    std::int64_t removed_low_income = 0;
    std::int64_t removed_top_percentile = 0;
    std::int64_t removed_low_degree = 0;  // users removed by the degree rule
    std::int64_t removed_orphaned_clients = 0;
    std::int64_t removed_records = 0;
    std::int64_t retained_records = 0;
    std::int64_t retained_clients = 0;
    std::map<int, std::int64_t> labeled_per_category;
};

// Keyed anonymization of a raw phone number: SHA-256 over (key, separator,
// phone), truncated to 16 lowercase-hex characters. Deterministic for a
// given key. Throws InvalidInputError on empty input.
UserId anonymize(const std::string& raw_phone, const std::string& key);

// CSV header: origin,destination,timestamp,kind,duration,lat,lon
// Malformed rows are counted in the report and skipped; a missing or
// mismatched header is a FormatError. When `key` is non-empty, endpoint
// ids are anonymized with it (otherwise inputs are taken as pre-anonymized).
std::vector<CdrRecord> parse_cdr(std::istream& in, RejectionReport& report,
                                 const std::string& key = {});

// CSV header: phone,s0,s1,s2,s3,s4,s5,age (age may be empty).
std::vector<BankClient> parse_bank(std::istream& in, RejectionReport& report,
                                   const std::string& key = {});

// Inner join on phone ids. Duplicate bank phones are a hard error (income
// would be ambiguous); the message lists the duplicates.
JoinedDataset join(std::vector<CdrRecord> cdrs, std::vector<BankClient> clients);

// Applies the three outlier rules in order: (a) labeled users below the
// income floor, (b) labeled users strictly above the top-percentile
// threshold (nearest-rank quantile over survivors of (a)), (c) users at or
// below the call-count bound. Degrees are evaluated once on the records
// surviving (a) and (b); removing a user removes its records. Clients left
// without any record afterwards are dropped to keep the dataset consistent.
JoinedDataset apply_filters(JoinedDataset data, const FilterConfig& cfg,
                            const CategorySchema& schema, FilterReport& report);

// One 5-year age bin with income quartiles.
struct AgeBinSummary {
    int age_lo = 0;  // bin is [age_lo, age_lo + 5)
    std::int64_t count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Income distribution by age for labeled users with a known age. Bins are
// anchored at multiples of five; empty when no client has an age.
std::vector<AgeBinSummary> income_by_age_summary(const std::vector<BankClient>& clients);

}  // namespace incomenet
