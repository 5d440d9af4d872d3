#include "doctest.h"

#include <random>

#include "nzam/lattice.hpp"
#include "nzam/linalg.hpp"

using namespace nzam;

namespace {

ChainModel model(const std::string& name, int n) {
    ChainSpec s;
    s.model = name;
    s.n_env = n;
    s.coupling = 0.8;
    s.field = 0.6;
    s.anisotropy = 0.5;
    s.seed = 3;
    return build_chain(s);
}

// -i [H_I(t), X] with the dense interaction-picture Hamiltonian
Mat dense_liouvillian(const ChainModel& m, double t, const Mat& x) {
    const Mat u = herm_exp(m.h0(), cplx(0.0, t));
    const Mat hi = u * m.hi() * u.adjoint();
    return -kI * (hi * x - x * hi);
}

} // namespace

TEST_CASE("bond terms") {
    const auto m = model("tfim", 3);
    Mat zz = Mat::Zero(4, 4);
    zz.diagonal() << 1.0, -1.0, -1.0, 1.0;
    CHECK((m.h_bond[1] + 0.8 * zz).norm() < 1e-12);
    CHECK(m.num_bonds() == 3);
    CHECK((m.bond_at(2, 0.0) - m.h_bond[2]).norm() < 1e-12);
    CHECK(m.coupling_bound() == doctest::Approx(1.6));
    ChainSpec bad;
    bad.model = "heisenberg";
    CHECK_THROWS(build_chain(bad));
    bad.model = "tfim";
    bad.n_env = 12;
    CHECK_THROWS(build_chain(bad));
}

TEST_CASE("Liouvillian matches the dense interaction-picture commutator") {
    std::mt19937_64 rng(1);
    for (const char* name : {"tfim", "xxz", "random"}) {
        const auto m = model(name, 3);
        const Mat x = ginibre(16, 16, rng);
        const Mat h = random_hermitian(16, rng);
        for (double t : {0.0, 0.37}) {
            CHECK((liouvillian(m, t, 0, m.num_bonds(), x) - dense_liouvillian(m, t, x)).norm() < 1e-10);
            CHECK((liouvillian(m, t, 0, m.num_bonds(), h, true) - liouvillian(m, t, 0, m.num_bonds(), h)).norm() < 1e-10);
        }
    }
}

TEST_CASE("partial traces kill the bonds beyond the kept block") {
    std::mt19937_64 rng(2);
    const auto m = model("xxz", 4);
    const Mat x = random_hermitian(32, rng);
    const double t = 0.21;
    for (int n = 0; n < 4; ++n) {
        const Mat full = reduce_to(m, n, liouvillian(m, t, 0, m.num_bonds(), x));
        const Mat head = reduce_to(m, n, liouvillian(m, t, 0, n + 1, x));
        CHECK((full - head).norm() < 1e-10);
    }
    CHECK((reduce_to(m, 1, x) - partial_trace(x, m.layout, {0, 1})).norm() < 1e-12);
    CHECK((boundary_flow(m, t, reduce_to(m, 1, x)) - reduce_to(m, 0, liouvillian(m, t, 0, 1, x))).norm() < 1e-10);
}

TEST_CASE("partition superoperators sum to the total") {
    std::mt19937_64 rng(3);
    const auto m = model("tfim", 3);
    const LiouvillePartition p{&m};
    const Mat x = random_hermitian(16, rng);
    const double t = 0.4;
    for (int n = 0; n < 3; ++n) {
        const Mat sum = p.head(n, t)(x) + p.bond(n, t)(x) + p.tail(n, t)(x);
        CHECK((sum - p.total(t)(x)).norm() < 1e-10);
    }
    CHECK((p.trace_to(1)(x) - reduce_to(m, 1, x)).norm() < 1e-12);
}

TEST_CASE("commutator bound") {
    std::mt19937_64 rng(4);
    const auto m = model("random", 4);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat o = random_hermitian(32, rng);
        const int n = 1 + trial % 4, k = trial % 4;
        const auto r = commutator_bound_check(m, n, k, o, 0.1 * trial);
        CHECK(r.holds);
        CHECK(r.lhs <= r.rhs + 1e-12);
    }
}

TEST_CASE("boundary factor scales the first bond only") {
    ChainSpec s;
    s.boundary = 0.25;
    const auto m = build_chain(s);
    const auto ref = build_chain(ChainSpec{});
    CHECK((m.h_bond[0] - 0.25 * ref.h_bond[0]).norm() < 1e-12);
    CHECK((m.h_bond[1] - ref.h_bond[1]).norm() < 1e-12);
}
