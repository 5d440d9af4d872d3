#include "doctest.h"

#include <cmath>

#include "nzam/enumerate.hpp"
#include "oracles.hpp"

using namespace nzam;

TEST_CASE("half-line sequence counts") {
    const std::uint64_t frozen[] = {1, 2, 5, 14, 42, 132, 429, 1429, 4848, 16676, 57972, 203203, 716948};
    for (int k = 0; k <= 12; ++k) {
        const auto c = count_1d_sequences(k);
        CHECK(c.count == frozen[k]);
        CHECK(c.count == oracle::sequence_count(k));
        CHECK(c.holds);
        CHECK(c.bound == std::pow(4.0, k));
    }
    CHECK_THROWS(count_1d_sequences(13));
}

TEST_CASE("animal counts against set growth") {
    const auto sq = oracle::animal_counts(true, 6);
    const auto line = oracle::animal_counts(false, 6);
    const std::uint64_t frozen[] = {1, 1, 6, 33, 176, 930, 4884};
    const auto got_sq = count_animals_upto("square", 6);
    const auto got_line = count_animals_upto("1d", 6);
    for (int i = 0; i <= 6; ++i) {
        CHECK(got_sq[i].count == sq[i]);
        CHECK(got_sq[i].count == frozen[i]);
        CHECK(got_line[i].count == line[i]);
        CHECK(got_line[i].count == 1);
        CHECK(got_sq[i].holds);
    }
    CHECK(count_animals("square", 1).bound == doctest::Approx(4.0 * std::exp(1.0)));
    CHECK(count_animals("1d", 2).bound == doctest::Approx(std::pow(2.0 * std::exp(1.0), 2)));
    CHECK_THROWS(count_animals("hex", 2));
}
