#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "incomenet/errors.hpp"

namespace incomenet {

// Anonymized phone identifier; opaque token used as the join key between
// call records and bank records.
using UserId = std::string;

enum class CdrKind : std::uint8_t { voice, sms };

struct Coordinates {
    double lat = 0.0;
    double lon = 0.0;
};

// One communication event. duration is 0 for sms; self-events are rejected
// at ingestion, so origin != destination always holds for stored records.
struct CdrRecord {
    UserId origin;
    UserId destination;
    std::int64_t timestamp = 0;  // seconds since epoch
    CdrKind kind = CdrKind::voice;
    std::int64_t duration = 0;  // seconds
    std::optional<Coordinates> coords;
};

// One bank client row. avg_income is always the exact arithmetic mean of
// the six monthly values.
struct BankClient {
    UserId phone;
    std::array<double, 6> monthly_incomes{};
    double avg_income = 0.0;
    std::optional<int> age;
};

// Ordered half-open monthly-income ranges [lo_i, hi_i) defining categories
// 1..k; the last range is unbounded above.
class CategorySchema {
  public:
    // bounds = lower bounds of each range, strictly increasing.
    explicit CategorySchema(std::vector<double> lower_bounds);

    static CategorySchema binary();      // [54,340), [340,inf)
    static CategorySchema five_class();  // [54,135), [135,405), [405,1080), [1080,2700), [2700,inf)

    int size() const { return static_cast<int>(lower_bounds_.size()); }
    double lower_bound(int category) const { return lower_bounds_.at(category - 1); }
    double upper_bound(int category) const {
        return category == size() ? std::numeric_limits<double>::infinity()
                                  : lower_bounds_.at(category);
    }
    double floor() const { return lower_bounds_.front(); }

  private:
    std::vector<double> lower_bounds_;
};

// Category of an income under the schema, 1..k; nullopt when the income
// falls below the schema floor (such users are outside every category).
// Throws InvalidInputError for negative or non-finite incomes.
std::optional<int> categorize(double income, const CategorySchema& schema);

}  // namespace incomenet
