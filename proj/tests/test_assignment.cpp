#include "doctest.h"

#include <random>

#include "nzam/assignment.hpp"
#include "nzam/correlations.hpp"
#include "nzam/linalg.hpp"

using namespace nzam;

namespace {

AssignmentMap map_of(const SeparableDecomposition& d) { return AssignmentMap::build(d, choose_basis(d)); }

} // namespace

TEST_CASE("the anchor is restored from its own marginal") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const int db = 2 + trial % 3;
        const auto d = random_separable(2, db, 1 + trial % 4, rng, 1 + trial % 2);
        const auto a = map_of(d);
        CHECK((a.apply(d.a_marginal()) - d.reconstruct()).norm() < 1e-10);
    }
}

TEST_CASE("outputs are states and both evaluation paths agree") {
    std::mt19937_64 rng(2);
    const auto d = random_separable(3, 2, 4, rng, 2);
    const auto a = map_of(d);
    CHECK((a.completeness() - Mat::Identity(3, 3)).norm() < 1e-10);
    for (int k = 0; k < 5; ++k) {
        const Mat rho = random_state(SpaceLayout({3}), 3, 100 + k);
        const Mat out = a.apply(rho);
        CHECK(is_density_matrix(out, 1e-10));
        CHECK((out - a.apply_kraus(rho)).norm() < 1e-10);
    }
}

TEST_CASE("contraction under the reduced map") {
    std::mt19937_64 rng(3);
    const auto d = random_separable(2, 3, 3, rng);
    const auto a = map_of(d);
    const SpaceLayout l({2, 3});
    for (int k = 0; k < 50; ++k) {
        const Mat o = random_hermitian(6, rng);
        CHECK(schatten1(a.apply(partial_trace(o, l, {0}))) <= schatten1(o) + 1e-10);
    }
}

TEST_CASE("dynamic maps are completely positive and trace preserving") {
    std::mt19937_64 rng(4);
    const auto d = random_separable(2, 2, 3, rng);
    const auto a = map_of(d);
    const Mat u = haar_unitary(4, rng);
    const Mat c = choi(dynamic_map(a, u));
    CHECK(min_eigenvalue(c) > -1e-10);
    CHECK((choi_output_trace(c, 2) - Mat::Identity(2, 2)).norm() < 1e-10);
    CHECK_THROWS(dynamic_map(a, Mat::Identity(4, 4) * 2.0));
}

TEST_CASE("basis choice prefers the decomposition's own states") {
    Vec zero = Vec::Zero(2), one = Vec::Zero(2);
    zero(0) = 1.0;
    one(1) = 1.0;
    SeparableDecomposition d;
    d.weights = {0.3, 0.7};
    d.a_states = {zero, one};
    d.b_states = {Mat::Identity(2, 2) / 2.0, pure_projector(zero)};
    const auto c = choose_basis(d);
    CHECK(c.p_max == doctest::Approx(1.0));
    CHECK_FALSE(c.restricted);
}

TEST_CASE("null directions need an explicit restriction") {
    Vec zero = Vec::Zero(2);
    zero(0) = 1.0;
    SeparableDecomposition d;
    d.weights = {1.0};
    d.a_states = {zero};
    d.b_states = {Mat::Identity(3, 3) / 3.0};
    auto c = score_basis(d, Mat::Identity(2, 2));
    CHECK(c.restricted);
    const auto a = AssignmentMap::build(d, c);
    CHECK((a.completeness() - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK(is_density_matrix(a.apply(Mat::Identity(2, 2) / 2.0)));
    c.restricted = false;
    CHECK_THROWS(AssignmentMap::build(d, c));
}

TEST_CASE("projection superoperators") {
    std::mt19937_64 rng(5);
    for (int dim_e = 2; dim_e <= 4; ++dim_e) {
        const auto p = random_projection(dim_e, rng);
        CHECK(p.defect() < 1e-10);
        const Mat rho = random_state(SpaceLayout({2, dim_e}), 2 * dim_e, 7);
        const Mat once = p.apply(rho, 2);
        CHECK((p.apply(once, 2) - once).norm() < 1e-10);
        CHECK(std::abs(discord(BipartiteState::of(once, 2, dim_e), Side::B)) < 1e-8);
    }
    const auto st = standard_projection(Mat::Identity(3, 3) / 3.0);
    st.validate();
    CHECK(st.a_ops.size() == 1);
}
