#include "doctest.h"
#include "incomenet/rng.hpp"
#include "incomenet/types.hpp"

using namespace incomenet;

TEST_CASE("categorize respects half-open boundaries") {
    const auto binary = CategorySchema::binary();
    CHECK(categorize(54.0, binary) == 1);
    CHECK(categorize(339.99, binary) == 1);
    CHECK(categorize(340.0, binary) == 2);  // boundary belongs to the upper range
    CHECK(categorize(10.0, binary) == std::nullopt);

    const auto five = CategorySchema::five_class();
    CHECK(categorize(2700.0, five) == 5);
    CHECK(categorize(2699.99, five) == 4);
    CHECK(categorize(135.0, five) == 2);
}

TEST_CASE("categorize rejects invalid incomes") {
    const auto binary = CategorySchema::binary();
    CHECK_THROWS_AS(categorize(-1.0, binary), InvalidInputError);
    CHECK_THROWS_AS(categorize(std::numeric_limits<double>::infinity(), binary),
                    InvalidInputError);
    CHECK_THROWS_AS(categorize(std::numeric_limits<double>::quiet_NaN(), binary),
                    InvalidInputError);
}

TEST_CASE("schema bounds must be increasing") {
    CHECK_THROWS_AS(CategorySchema({100.0, 100.0}), InvalidInputError);
    CHECK_THROWS_AS(CategorySchema({100.0, 50.0}), InvalidInputError);
    CHECK_THROWS_AS(CategorySchema({}), InvalidInputError);
}

TEST_CASE("categorize partitions [floor, inf) and is monotone") {
    const auto five = CategorySchema::five_class();
    auto eng = rng::make_engine(7, 0);
    double prev_income = 54.0;
    int prev_cat = 1;
    std::vector<double> incomes;
    for (int i = 0; i < 2000; ++i) {
        incomes.push_back(54.0 + 5000.0 * rng::uniform01(eng));
    }
    std::sort(incomes.begin(), incomes.end());
    for (const double income : incomes) {
        const auto cat = categorize(income, five);
        REQUIRE(cat.has_value());  // partition: everything above the floor lands somewhere
        CHECK(*cat >= prev_cat);   // monotone in income
        CHECK(income >= five.lower_bound(*cat));
        CHECK(income < five.upper_bound(*cat));
        prev_cat = *cat;
        prev_income = income;
    }
    (void)prev_income;
}
