#include "incomenet/types.hpp"

#include <cmath>

namespace incomenet {

CategorySchema::CategorySchema(std::vector<double> lower_bounds)
    : lower_bounds_(std::move(lower_bounds)) {
    if (lower_bounds_.empty()) {
        throw InvalidInputError("category schema needs at least one range");
    }
    for (std::size_t i = 0; i < lower_bounds_.size(); ++i) {
        if (!std::isfinite(lower_bounds_[i]) || lower_bounds_[i] < 0.0) {
            throw InvalidInputError("category bounds must be finite and non-negative");
        }
        if (i > 0 && lower_bounds_[i] <= lower_bounds_[i - 1]) {
            throw InvalidInputError("category bounds must be strictly increasing");
        }
    }
}

CategorySchema CategorySchema::binary() { return CategorySchema({54.0, 340.0}); }

CategorySchema CategorySchema::five_class() {
    return CategorySchema({54.0, 135.0, 405.0, 1080.0, 2700.0});
}

std::optional<int> categorize(double income, const CategorySchema& schema) {
    if (!std::isfinite(income) || income < 0.0) {
        throw InvalidInputError("income must be finite and non-negative");
    }
    if (income < schema.floor()) return std::nullopt;
    // Boundary values belong to the upper range: ranges are [lo, hi).
    int category = 1;
    for (int i = 2; i <= schema.size(); ++i) {
        if (income >= schema.lower_bound(i)) category = i;
    }
    return category;
}

}  // namespace incomenet
