#include "doctest.h"

#include <random>

#include "nzam/bss.hpp"
#include "nzam/correlations.hpp"
#include "nzam/linalg.hpp"
#include "oracles.hpp"

using namespace nzam;

namespace {

void check_decomposition(const BssResult& r, const BipartiteState& s) {
    r.decomposition.validate();
    CHECK(schatten1(s.grouped() - r.decomposition.reconstruct()) == doctest::Approx(r.distance).epsilon(1e-9));
}

} // namespace

TEST_CASE("product states are their own best separable state") {
    std::mt19937_64 rng(1);
    const Mat rho = kron(random_state(SpaceLayout({2}), 2, 3), random_state(SpaceLayout({4}), 4, 5));
    const auto s = BipartiteState::of(rho, 2, 4);
    const auto r = best_separable_state(s);
    CHECK(r.distance <= BssSettings{}.tol);
    CHECK(r.certified);
    check_decomposition(r, s);
}

TEST_CASE("reconstructed separable decompositions are recovered") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = random_separable(2, 2, 3, rng, 2);
        const auto s = BipartiteState::of(d.reconstruct(), 2, 2);
        const auto r = best_separable_state(s);
        CHECK(r.distance < 1e-6);
        check_decomposition(r, s);
    }
}

TEST_CASE("Bell state distance matches the isotropic-family oracle") {
    const double expect = oracle::bell_bss_distance();
    CHECK(expect == doctest::Approx(1.0).epsilon(1e-6));
    const auto s = BipartiteState::of(bell_state(), 2, 2);
    const auto r = best_separable_state(s);
    CHECK(r.distance >= expect - 1e-9);
    CHECK(r.distance <= expect + 1e-3);
    check_decomposition(r, s);
    CHECK_FALSE(r.certified);
}

TEST_CASE("side A can be any site") {
    // Bell pair on sites 0 and 2 with a spectator on site 1; cut {2} | {0, 1}
    const Mat rho = permute_sites(kron(bell_state(), Mat::Identity(2, 2) / 2.0), SpaceLayout({2, 2, 2}), {0, 2, 1});
    BipartiteState s{rho, SpaceLayout({2, 2, 2}), {2}};
    BssSettings st;
    st.restarts = 4;
    const auto r = best_separable_state(s, st);
    CHECK(r.decomposition.dim_a() == 2);
    CHECK(r.decomposition.dim_b() == 4);
    CHECK(r.distance == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("settings are honoured") {
    const auto s = BipartiteState::of(werner_state(0.6), 2, 2);
    BssSettings a, b;
    a.seed = b.seed = 5;
    a.restarts = b.restarts = 2;
    const auto ra = best_separable_state(s, a), rb = best_separable_state(s, b);
    CHECK(ra.distance == rb.distance);
    BssSettings small;
    small.n_terms = 3;
    CHECK(best_separable_state(s, small).decomposition.size() <= 3);
    // Werner p: the separable boundary sits at p = 1/3, distance 3(p - 1/3)/2
    CHECK(ra.distance == doctest::Approx(1.5 * (0.6 - 1.0 / 3.0)).epsilon(1e-3));
}
