#include <stdexcept>

#include "doctest.h"
#include "tsad/core.hpp"

using namespace tsad;

TEST_CASE("TimeSeries shape and access") {
    const TimeSeries ts({1, 2, 3, 4, 5, 6}, 2, "pair");
    CHECK(ts.size() == 3);
    CHECK(ts.dims() == 2);
    CHECK(ts.at(1, 0) == 3);
    CHECK(ts.at(2, 1) == 6);
    CHECK(ts.name() == "pair");
    CHECK_THROWS_AS(TimeSeries({1, 2, 3}, 2), std::invalid_argument);
    CHECK_THROWS_AS(TimeSeries({1, 2}, 0), std::invalid_argument);
}

TEST_CASE("TimeSeries slice") {
    const auto ts = TimeSeries::univariate({0, 1, 2, 3, 4});
    const auto s = ts.slice(1, 3);
    CHECK(s.size() == 3);
    CHECK(s.at(0, 0) == 1);
    CHECK(s.at(2, 0) == 3);
    CHECK_THROWS_AS(ts.slice(3, 3), std::out_of_range);
}

TEST_CASE("range validation") {
    CHECK_NOTHROW(validate_ranges({{0, 2}, {4, 4}}, 5));
    CHECK_THROWS_AS(validate_ranges({{0, 5}}, 5), std::invalid_argument);   // out of bounds
    CHECK_THROWS_AS(validate_ranges({{3, 2}}, 5), std::invalid_argument);   // inverted
    CHECK_THROWS_AS(validate_ranges({{0, 2}, {2, 3}}, 5), std::invalid_argument);  // overlap
    CHECK_THROWS_AS(validate_ranges({{3, 3}, {0, 1}}, 5), std::invalid_argument);  // unsorted
}

TEST_CASE("ranges to labels round trip") {
    const std::vector<AnomalyRange> ranges = {{1, 2}, {4, 4}};
    const auto labels = ranges_to_labels(ranges, 6);
    CHECK(labels.values() == std::vector<int>{0, 1, 1, 0, 1, 0});
    CHECK(labels_to_ranges(labels) == ranges);

    const auto empty = ranges_to_labels({}, 3);
    CHECK(empty.values() == std::vector<int>{0, 0, 0});
    CHECK(labels_to_ranges(empty).empty());

    const auto full = ranges_to_labels({{0, 2}}, 3);
    CHECK(labels_to_ranges(full) == std::vector<AnomalyRange>{{0, 2}});
}

TEST_CASE("LabelSeries rejects non-binary values") {
    CHECK_THROWS_AS(LabelSeries({0, 2, 1}), std::invalid_argument);
}
