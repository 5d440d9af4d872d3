#include "doctest.h"

#include <cmath>
#include <random>

#include "nzam/correlations.hpp"
#include "nzam/linalg.hpp"

using namespace nzam;

TEST_CASE("mutual information") {
    CHECK(mutual_information(BipartiteState::of(bell_state(), 2, 2)) == doctest::Approx(2.0).epsilon(1e-10));
    std::mt19937_64 rng(1);
    const Mat p = kron(pure_projector(random_pure(2, rng)), random_state(SpaceLayout({3}), 3, 4));
    CHECK(std::abs(mutual_information(BipartiteState::of(p, 2, 3))) < 1e-10);
}

TEST_CASE("Werner partial transpose spectrum") {
    // PT eigenvalues are (1 + p)/4 three times and (1 - 3p)/4
    for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.9}) {
        const auto r = ppt_check(BipartiteState::of(werner_state(p), 2, 2));
        CHECK(r.min_eigenvalue == doctest::Approx((1.0 - 3.0 * p) / 4.0).epsilon(1e-10));
        CHECK(r.exact);
    }
    CHECK(ppt_separable(BipartiteState::of(werner_state(0.2), 2, 2)));
    CHECK_FALSE(ppt_separable(BipartiteState::of(werner_state(0.5), 2, 2)));
    CHECK_FALSE(ppt_check(BipartiteState::of(random_state(SpaceLayout({3, 3}), 9, 1), 3, 3)).exact);
}

TEST_CASE("discord of reference states") {
    const auto bell = BipartiteState::of(bell_state(), 2, 2);
    CHECK(discord(bell, Side::A) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(discord(bell, Side::B) == doctest::Approx(1.0).epsilon(1e-8));

    // classical on A, non-commuting conditional states on B
    Vec plus(2);
    plus << 1.0, 1.0;
    plus /= std::sqrt(2.0);
    Vec zero = Vec::Zero(2);
    zero(0) = 1.0;
    Vec one = Vec::Zero(2);
    one(1) = 1.0;
    const Mat cq = 0.5 * kron(pure_projector(zero), pure_projector(zero)) + 0.5 * kron(pure_projector(one), pure_projector(plus));
    const auto s = BipartiteState::of(cq, 2, 2);
    CHECK(std::abs(discord(s, Side::A)) < 1e-8);
    CHECK(discord(s, Side::B) > 1e-3);

    const Mat prod = kron(werner_state(0.0).topLeftCorner(2, 2) * 2.0, Mat::Identity(3, 3) / 3.0);
    CHECK(std::abs(discord(BipartiteState::of(prod, 2, 3), Side::B)) < 1e-8);
}

TEST_CASE("discord never goes below zero and stays below mutual information") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = BipartiteState::of(random_state(SpaceLayout({2, 2}), 4, seed), 2, 2);
        DiscordSearch q;
        q.refine_iters = 500;
        const double d = discord(s, Side::A, q);
        CHECK(d > -1e-10);
        CHECK(d <= mutual_information(s) + 1e-10);
    }
}

TEST_CASE("conditional entropy in a fixed basis") {
    const Mat basis = Mat::Identity(2, 2);
    CHECK(std::abs(conditional_entropy(bell_state(), 2, 2, Side::A, basis)) < 1e-12);
    CHECK(conditional_entropy(Mat::Identity(4, 4) / 4.0, 2, 2, Side::A, basis) == doctest::Approx(1.0));
}

TEST_CASE("extendibility distance bound") {
    const auto b = dfse_bound(2.0, 4.0, 8.0);
    CHECK(b.raw == doctest::Approx(std::sqrt(918.0 * std::log(2.0) * 2.0) * std::sqrt(0.5)));
    CHECK(b.capped == kTrivialDistanceCap);
    CHECK(dfse_bound(2.0, 1.0, 1e9).raw < dfse_bound(2.0, 1.0, 1e8).raw);
    CHECK(dfse_bound(2.0, 1.0, 1e9).capped == dfse_bound(2.0, 1.0, 1e9).raw);
    CHECK_THROWS(dfse_bound(1.0, 1.0, 1.0));
    CHECK_THROWS(dfse_bound(2.0, 1.0, 0.0));
}
