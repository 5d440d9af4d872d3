#include "doctest.h"

#include <random>

#include "nzam/linalg.hpp"
#include "nzam/states.hpp"

using namespace nzam;

TEST_CASE("named states") {
    CHECK(is_density_matrix(bell_state()));
    CHECK(purity(bell_state()) == doctest::Approx(1.0));
    CHECK(is_density_matrix(singlet_state()));
    for (double p : {0.0, 0.2, 1.0 / 3.0, 0.7, 1.0}) CHECK(is_density_matrix(werner_state(p)));
    CHECK((werner_state(0.0) - Mat::Identity(4, 4) / 4.0).norm() < 1e-15);
}

TEST_CASE("chain state vectors") {
    const Vec g = ghz_vector(4);
    CHECK(g.norm() == doctest::Approx(1.0));
    CHECK(std::abs(g(0)) == doctest::Approx(std::sqrt(0.5)));
    CHECK(std::abs(g(15)) == doctest::Approx(std::sqrt(0.5)));
    for (const char* spread : {"none", "even"}) {
        const int n = 4;
        const Mat rho = pure_projector(boundary_bell_vector(n, spread));
        const auto layout = SpaceLayout::chain(n);
        CHECK((partial_trace(rho, layout, {0}) - Mat::Identity(2, 2) / 2.0).norm() < 1e-12);
    }
    // spread "none": the partner of A is C1 alone
    const Mat rho = pure_projector(boundary_bell_vector(3, "none"));
    const Mat ac1 = partial_trace(rho, SpaceLayout::chain(3), {0, 1});
    CHECK(purity(ac1) == doctest::Approx(1.0));
    // spread "even": every environment site carries the same reduced state
    const Mat w = pure_projector(boundary_bell_vector(3, "even"));
    const auto l = SpaceLayout::chain(3);
    CHECK((partial_trace(w, l, {1}) - partial_trace(w, l, {3})).norm() < 1e-12);
    CHECK_THROWS(boundary_bell_vector(3, "odd"));
}

TEST_CASE("random states") {
    const auto layout = SpaceLayout::chain(2);
    const Mat r = random_state(layout, 3, 17);
    CHECK(is_density_matrix(r));
    CHECK((herm_eigenvalues(r).array() > 1e-12).count() == 3);
    CHECK((random_state(layout, 3, 17) - r).norm() == 0.0);

    std::mt19937_64 rng(1);
    const auto d = random_separable(2, 4, 5, rng, 2);
    d.validate();
    CHECK(d.size() == 5);
    CHECK(is_density_matrix(d.reconstruct()));
    CHECK((partial_trace(d.reconstruct(), SpaceLayout({2, 4}), {0}) - d.a_marginal()).norm() < 1e-12);
}

TEST_CASE("bipartite grouping") {
    std::mt19937_64 rng(2);
    const Mat a = random_state(SpaceLayout({2}), 2, 1), b = random_state(SpaceLayout({3}), 3, 2);
    const Mat c = random_state(SpaceLayout({2}), 2, 3);
    BipartiteState s{kron_all({a, b, c}), SpaceLayout({2, 3, 2}), {1}};
    CHECK(s.dim_a() == 3);
    CHECK(s.dim_b() == 4);
    CHECK((s.grouped() - kron_all({b, a, c})).norm() < 1e-12);
    CHECK(s.side_b() == std::vector<int>{0, 2});
    s.validate();
}
