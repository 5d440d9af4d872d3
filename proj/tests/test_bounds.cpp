#include "doctest.h"

#include <cmath>

#include "nzam/bounds.hpp"
#include "oracles.hpp"

using namespace nzam;

TEST_CASE("tail function values") {
    // z = 0.8: e^z - 1 - z - z^2/2
    CHECK(y_tail(0.1, 3, 1.0) == doctest::Approx(std::exp(0.8) - 1.0 - 0.8 - 0.32).epsilon(1e-12));
    CHECK(y_tail(0.1, 0, 1.0) == doctest::Approx(std::exp(0.8)).epsilon(1e-14));
    CHECK(y_tail(0.0, 0, 1.0) == 1.0);
    CHECK(y_tail(0.0, 4, 1.0) == 0.0);
    CHECK_THROWS(y_tail(-1.0, 1, 1.0));
}

TEST_CASE("tail function against the multiprecision partial sum") {
    double worst = 0.0;
    for (double z : {1e-3, 0.1, 0.8, 2.5, 7.0, 15.0, 29.9, 30.0})
        for (int L = 0; L <= 25; ++L) {
            const double x = z / 8.0;
            const double ref = oracle::y_tail(x, L, 1.0);
            worst = std::max(worst, std::abs(y_tail(x, L, 1.0) - ref) / ref);
        }
    CHECK(worst <= 1e-10);
}

TEST_CASE("tail function monotonicity") {
    for (int L = 0; L < 20; ++L) CHECK(y_tail(0.3, L + 1, 1.0) < y_tail(0.3, L, 1.0));
    for (int k = 1; k < 20; ++k) CHECK(y_tail(0.05 * (k + 1), 4, 1.0) > y_tail(0.05 * k, 4, 1.0));
}

TEST_CASE("exponential decay form dominates inside its range") {
    for (int L = 1; L <= 25; ++L)
        for (double x = 0.01; x < 3.0; x += 0.01) {
            if (8.0 * std::exp(1.0) * x / L >= 1.0) continue;
            CHECK(y_tail(x, L, 1.0) <= decay_form(x, L, 1.0));
        }
}

TEST_CASE("Stirling inequality") {
    const auto a = stirling_check(1, 0);
    CHECK(a.holds);
    CHECK(a.exact);
    const auto b = stirling_check(2, 3);
    CHECK(b.holds);
    CHECK(std::exp(b.log_lhs) == doctest::Approx(1.0 / 120.0));
    CHECK(std::exp(b.log_rhs) == doctest::Approx(std::exp(2.0) / 48.0));
    // the printed power L^k fails once k outgrows L; L^L holds throughout
    CHECK_FALSE(stirling_check(2, 10).holds);
    CHECK(stirling_check(2, 9).holds);
    for (int L = 1; L <= 20; ++L)
        for (int k = 0; k <= 20; ++k) CHECK(stirling_check(L, k).holds_power_l);
    CHECK(stirling_check(30, 30).holds);
    CHECK_FALSE(stirling_check(30, 30).exact);
    CHECK_THROWS(stirling_check(0, 1));
}

TEST_CASE("measured-norm bound") {
    CHECK(inhom_bound_1d_measured(1.0, 0.4, {0.0, 0.0, 0.0}).total == 0.0);
    // x = 0 leaves the k = 0 term of the nearest distance
    const auto r = inhom_bound_1d_measured(2.0, 0.0, {0.3, 0.5, 0.9});
    CHECK(r.total == doctest::Approx(2.0 * 0.3));
    CHECK(r.terms.size() == 3);
    const auto q = inhom_bound_1d_measured(1.5, 0.2, {0.3, 0.5});
    CHECK(q.total == doctest::Approx(1.5 * (y_tail(0.2, 0, 1.5) * 0.3 + y_tail(0.2, 1, 1.5) * 0.5)));
    CHECK_THROWS(inhom_bound_1d_measured(1.0, 0.1, {}));
}

TEST_CASE("analytic one-dimensional bound") {
    BoundParams p;
    p.L_env = 40;
    p.x = 0.02;
    const auto r = inhom_bound_1d_analytic(p);
    CHECK(r.terms.size() == 40);
    CHECK(r.total == doctest::Approx(r.near_sum + r.far_sum));
    CHECK(r.conditional_on_C);
    CHECK(r.D == crossover_distance_1d(p));
    p.C = 3.0;
    CHECK(inhom_bound_1d_analytic(p).total == doctest::Approx(3.0 * r.total));
    p.x = 0.0;
    CHECK(inhom_bound_1d_analytic(p).total == 0.0);
    p.x = 1.0;
    CHECK(inhom_bound_1d_analytic(p).vacuous);
    const auto j = r.to_json();
    CHECK(j.contains("per_distance"));
    CHECK(j["verdict"] == "finite");
}

TEST_CASE("higher-dimensional bound") {
    BoundParams p;
    p.K = 4;
    p.L_env = 100;
    p.x = 0.01;
    const auto r = inhom_bound_highd(p);
    CHECK_FALSE(r.vacuous);
    CHECK(r.total == doctest::Approx(r.near_sum + r.far_sum));
    // the d <= D part scales as L^{-alpha/2} for fixed D
    BoundParams q = p;
    q.L_env = 200;
    CHECK(highd_near_sum(p, 5) / highd_near_sum(q, 5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    p.x = 0.5;
    const auto v = inhom_bound_highd(p);
    CHECK(v.vacuous);
    CHECK(std::isinf(v.total));
    CHECK(v.to_json()["verdict"] == "vacuous");
    p.x = 0.0;
    CHECK(inhom_bound_highd(p).total == 0.0);
    BoundParams bad;
    bad.J = -1.0;
    CHECK_THROWS(validate(bad));
}
