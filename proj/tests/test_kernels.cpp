#include "doctest.h"

#include <random>

#include "nzam/kernels.hpp"
#include "nzam/linalg.hpp"

using namespace nzam;

namespace {

Mat random_op(std::int64_t d, std::mt19937_64& rng) { return ginibre(d, d, rng); }

} // namespace

TEST_CASE("local products match the embedded-operator reference") {
    std::mt19937_64 rng(3);
    const SpaceLayout layout({2, 3, 2, 2});
    const Mat x = random_op(layout.total_dim(), rng);
    for (int first = 0; first < 4; ++first)
        for (int count = 1; first + count <= 4; ++count) {
            std::vector<int> sites;
            for (int s = first; s < first + count; ++s) sites.push_back(s);
            const Mat op = random_op(layout.dim_of(sites), rng);
            CHECK((kernels::apply_local_left(op, layout, first, count, x) -
                   kernels::serial::apply_local_left(op, layout, first, count, x))
                      .norm() < 1e-12);
            CHECK((kernels::apply_local_right(x, op, layout, first, count) -
                   kernels::serial::apply_local_right(x, op, layout, first, count))
                      .norm() < 1e-12);
        }
}

TEST_CASE("accumulate adds a scaled right product") {
    std::mt19937_64 rng(4);
    const auto layout = SpaceLayout::chain(3);
    const Mat x = random_op(16, rng), op = random_op(4, rng);
    Mat acc = random_op(16, rng);
    const Mat expect = acc + cplx(0.5, -2.0) * kernels::serial::apply_local_right(x, op, layout, 1, 2);
    kernels::accumulate_local_right(acc, cplx(0.5, -2.0), x, op, layout, 1, 2);
    CHECK((acc - expect).norm() < 1e-12);
}

TEST_CASE("partial trace matches the index-walk reference") {
    std::mt19937_64 rng(5);
    const SpaceLayout layout({2, 3, 2, 2});
    const Mat x = random_op(layout.total_dim(), rng);
    const std::vector<std::vector<int>> keeps{{0}, {1}, {3}, {0, 1}, {0, 2}, {1, 3}, {0, 1, 2, 3}, {0, 2, 3}};
    for (const auto& keep : keeps)
        CHECK((kernels::partial_trace(x, layout, keep) - kernels::serial::partial_trace(x, layout, keep)).norm() < 1e-12);
    CHECK((kernels::partial_trace(x, layout, {2, 0}) - kernels::partial_trace(x, layout, {0, 2})).norm() == 0.0);
    CHECK_THROWS(kernels::partial_trace(x, layout, {}));
    CHECK_THROWS(kernels::partial_trace(x, layout, {4}));
}

TEST_CASE("results do not depend on the thread count") {
    std::mt19937_64 rng(6);
    const auto layout = SpaceLayout::chain(5);
    const Mat x = random_op(layout.total_dim(), rng), op = random_op(4, rng);
    const int before = kernels::num_threads();
    kernels::set_num_threads(1);
    const Mat a = kernels::apply_local_left(op, layout, 2, 2, x);
    const Mat p = kernels::partial_trace(x, layout, {0, 1});
    kernels::set_num_threads(4);
    const Mat b = kernels::apply_local_left(op, layout, 2, 2, x);
    const Mat q = kernels::partial_trace(x, layout, {0, 1});
    kernels::set_num_threads(before);
    CHECK((a - b).norm() == 0.0);
    CHECK((p - q).norm() == 0.0);
}

TEST_CASE("dimension mismatches are rejected") {
    const auto layout = SpaceLayout::chain(2);
    CHECK_THROWS(kernels::apply_local_left(Mat::Identity(3, 3), layout, 0, 1, Mat::Identity(8, 8)));
    CHECK_THROWS(kernels::apply_local_left(Mat::Identity(2, 2), layout, 2, 2, Mat::Identity(8, 8)));
    CHECK_THROWS(kernels::apply_local_right(Mat::Identity(4, 4), Mat::Identity(2, 2), layout, 0, 1));
}
