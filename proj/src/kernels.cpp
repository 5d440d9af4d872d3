#include "nzam/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#include "nzam/linalg.hpp"
#include "nzam/omp.hpp"

namespace nzam::kernels {

namespace {

struct BlockShape {
    std::int64_t hi = 1; // dims before the block
    std::int64_t m = 1;  // block dim
    std::int64_t lo = 1; // dims after the block
};

BlockShape block_shape(const SpaceLayout& layout, int first, int count, const Mat& op) {
    if (first < 0 || count <= 0 || first + count > layout.num_sites())
        throw std::invalid_argument("kernels: site block out of range");
    BlockShape b;
    for (int s = 0; s < first; ++s) b.hi *= layout.site_dim(s);
    for (int s = first; s < first + count; ++s) b.m *= layout.site_dim(s);
    for (int s = first + count; s < layout.num_sites(); ++s) b.lo *= layout.site_dim(s);
    if (op.rows() != b.m || op.cols() != b.m) throw std::invalid_argument("kernels: local operator has wrong dimension");
    return b;
}

void check_keep(const SpaceLayout& layout, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must not be empty");
    for (std::size_t k = 0; k < keep.size(); ++k) {
        if (keep[k] < 0 || keep[k] >= layout.num_sites()) throw std::invalid_argument("partial_trace: site out of range");
        if (k > 0 && keep[k] <= keep[k - 1]) throw std::invalid_argument("partial_trace: keep set must be ascending");
    }
}

std::vector<int> normalized_keep(const SpaceLayout& layout, std::vector<int> keep) {
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    check_keep(layout, keep);
    return keep;
}

// Offsets of every basis index of the listed sites inside the full index.
std::vector<std::int64_t> site_offsets(const SpaceLayout& layout, const std::vector<int>& sites) {
    const int n = layout.num_sites();
    std::vector<std::int64_t> stride(static_cast<std::size_t>(n));
    std::int64_t acc = 1;
    for (int s = n - 1; s >= 0; --s) {
        stride[static_cast<std::size_t>(s)] = acc;
        acc *= layout.site_dim(s);
    }
    std::vector<std::int64_t> out{0};
    for (int s : sites) {
        std::vector<std::int64_t> next;
        next.reserve(out.size() * static_cast<std::size_t>(layout.site_dim(s)));
        for (std::int64_t base : out)
            for (int digit = 0; digit < layout.site_dim(s); ++digit)
                next.push_back(base + digit * stride[static_cast<std::size_t>(s)]);
        out = std::move(next);
    }
    return out;
}

} // namespace

void set_num_threads(int n) {
    if (n <= 0) n = omp_get_max_threads();
    omp_set_num_threads(n);
}

int num_threads() { return omp_get_max_threads(); }

Mat apply_local_left(const Mat& op, const SpaceLayout& layout, int first, int count, const Mat& x) {
    const auto b = block_shape(layout, first, count, op);
    const std::int64_t d = layout.total_dim();
    if (x.rows() != d) throw std::invalid_argument("apply_local_left: operand dimension mismatch");
    const std::int64_t ncols = x.cols();
    Mat y(d, ncols);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < ncols; ++c) {
        for (std::int64_t hi = 0; hi < b.hi; ++hi) {
            const std::int64_t base = hi * b.m * b.lo;
            for (std::int64_t mu = 0; mu < b.m; ++mu) {
                auto out = y.col(c).segment(base + mu * b.lo, b.lo);
                out.setZero();
                for (std::int64_t nu = 0; nu < b.m; ++nu) {
                    const cplx w = op(mu, nu);
                    if (w == cplx(0.0)) continue;
                    out.noalias() += w * x.col(c).segment(base + nu * b.lo, b.lo);
                }
            }
        }
    }
    return y;
}

void accumulate_local_right(Mat& acc, cplx coeff, const Mat& x, const Mat& op, const SpaceLayout& layout,
                            int first, int count) {
    const auto b = block_shape(layout, first, count, op);
    const std::int64_t d = layout.total_dim();
    if (x.cols() != d || acc.rows() != x.rows() || acc.cols() != x.cols())
        throw std::invalid_argument("accumulate_local_right: operand dimension mismatch");
    const Mat w = coeff * op;
    const std::int64_t pairs = b.hi * b.lo;
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < pairs; ++p) {
        const std::int64_t hi = p / b.lo, lo = p % b.lo;
        const std::int64_t base = hi * b.m * b.lo + lo;
        for (std::int64_t mu = 0; mu < b.m; ++mu) {
            auto out = acc.col(base + mu * b.lo);
            for (std::int64_t nu = 0; nu < b.m; ++nu) {
                const cplx c = w(nu, mu);
                if (c == cplx(0.0)) continue;
                out.noalias() += c * x.col(base + nu * b.lo);
            }
        }
    }
}

Mat apply_local_right(const Mat& x, const Mat& op, const SpaceLayout& layout, int first, int count) {
    Mat y = Mat::Zero(x.rows(), x.cols());
    accumulate_local_right(y, cplx(1.0), x, op, layout, first, count);
    return y;
}

Mat partial_trace(const Mat& x, const SpaceLayout& layout, const std::vector<int>& keep_in) {
    const auto keep = normalized_keep(layout, keep_in);
    std::vector<int> traced;
    for (int s = 0; s < layout.num_sites(); ++s)
        if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);
    const auto ko = site_offsets(layout, keep);
    const auto to = site_offsets(layout, traced);
    const auto dk = static_cast<std::int64_t>(ko.size());
    const auto dt = static_cast<std::int64_t>(to.size());
    Mat out(dk, dk);
#pragma omp parallel for schedule(static)
    for (std::int64_t k2 = 0; k2 < dk; ++k2) {
        for (std::int64_t k1 = 0; k1 < dk; ++k1) {
            cplx s{0.0};
            const std::int64_t r0 = ko[static_cast<std::size_t>(k1)], c0 = ko[static_cast<std::size_t>(k2)];
            for (std::int64_t t = 0; t < dt; ++t) {
                const std::int64_t off = to[static_cast<std::size_t>(t)];
                s += x(r0 + off, c0 + off);
            }
            out(k1, k2) = s;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace serial {

Mat embed(const Mat& op, const SpaceLayout& layout, int first, int count) {
    const auto b = block_shape(layout, first, count, op);
    return kron(Mat::Identity(b.hi, b.hi), kron(op, Mat::Identity(b.lo, b.lo)));
}

Mat apply_local_left(const Mat& op, const SpaceLayout& layout, int first, int count, const Mat& x) {
    return embed(op, layout, first, count) * x;
}

Mat apply_local_right(const Mat& x, const Mat& op, const SpaceLayout& layout, int first, int count) {
    return x * embed(op, layout, first, count);
}

Mat partial_trace(const Mat& x, const SpaceLayout& layout, const std::vector<int>& keep_in) {
    const auto keep = normalized_keep(layout, keep_in);
    const int n = layout.num_sites();
    const std::int64_t d = layout.total_dim();
    std::vector<bool> kept(static_cast<std::size_t>(n), false);
    for (int s : keep) kept[static_cast<std::size_t>(s)] = true;

    // kept-index and traced-index of every full basis index
    std::vector<std::int64_t> kidx(static_cast<std::size_t>(d)), tidx(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < d; ++i) {
        std::int64_t rem = i, k = 0, t = 0;
        std::vector<int> digits(static_cast<std::size_t>(n));
        for (int s = n - 1; s >= 0; --s) {
            digits[static_cast<std::size_t>(s)] = static_cast<int>(rem % layout.site_dim(s));
            rem /= layout.site_dim(s);
        }
        for (int s = 0; s < n; ++s) {
            if (kept[static_cast<std::size_t>(s)])
                k = k * layout.site_dim(s) + digits[static_cast<std::size_t>(s)];
            else
                t = t * layout.site_dim(s) + digits[static_cast<std::size_t>(s)];
        }
        kidx[static_cast<std::size_t>(i)] = k;
        tidx[static_cast<std::size_t>(i)] = t;
    }
    const std::int64_t dk = layout.dim_of(keep);
    Mat out = Mat::Zero(dk, dk);
    for (std::int64_t j = 0; j < d; ++j)
        for (std::int64_t i = 0; i < d; ++i)
            if (tidx[static_cast<std::size_t>(i)] == tidx[static_cast<std::size_t>(j)])
                out(kidx[static_cast<std::size_t>(i)], kidx[static_cast<std::size_t>(j)]) += x(i, j);
    return out;
}

} // namespace serial

} // namespace nzam::kernels
