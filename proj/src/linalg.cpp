#include "nzam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nzam/kernels.hpp"

namespace nzam {

// ---------------------------------------------------------------------------
// SpaceLayout

SpaceLayout::SpaceLayout(std::vector<int> site_dims, std::vector<std::string> labels)
    : dims_(std::move(site_dims)), labels_(std::move(labels)) {
    if (dims_.empty()) throw std::invalid_argument("SpaceLayout: at least one site required");
    for (int d : dims_)
        if (d <= 0) throw std::invalid_argument("SpaceLayout: site dimensions must be positive");
    if (labels_.empty()) {
        for (std::size_t s = 0; s < dims_.size(); ++s) labels_.push_back("s" + std::to_string(s));
    }
    if (labels_.size() != dims_.size()) throw std::invalid_argument("SpaceLayout: label count mismatch");
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("SpaceLayout: labels must be unique");
    total_ = 1;
    for (int d : dims_) total_ *= d;
}

SpaceLayout SpaceLayout::chain(int n_env, int local_dim) {
    if (n_env < 0) throw std::invalid_argument("SpaceLayout::chain: negative environment size");
    std::vector<int> dims(static_cast<std::size_t>(n_env + 1), local_dim);
    std::vector<std::string> labels{"A"};
    for (int i = 1; i <= n_env; ++i) labels.push_back("C" + std::to_string(i));
    return SpaceLayout(std::move(dims), std::move(labels));
}

std::int64_t SpaceLayout::dim_of(const std::vector<int>& sites) const {
    std::int64_t d = 1;
    for (int s : sites) d *= site_dim(s);
    return d;
}

SpaceLayout SpaceLayout::subset(const std::vector<int>& sites) const {
    std::vector<int> d;
    std::vector<std::string> l;
    for (int s : sites) {
        d.push_back(site_dim(s));
        l.push_back(labels_.at(static_cast<std::size_t>(s)));
    }
    return SpaceLayout(std::move(d), std::move(l));
}

std::vector<int> SpaceLayout::prefix(int n) const {
    n = std::min(n, num_sites() - 1);
    std::vector<int> out(static_cast<std::size_t>(n + 1));
    std::iota(out.begin(), out.end(), 0);
    return out;
}

// ---------------------------------------------------------------------------
// Superop

Mat Superop::to_matrix() const {
    const std::int64_t d = dim;
    Mat s(d * d, d * d);
    for (std::int64_t j = 0; j < d; ++j) {
        for (std::int64_t i = 0; i < d; ++i) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            Mat out = action(e);
            s.col(i + j * d) = Eigen::Map<const Vec>(out.data(), d * d);
        }
    }
    return s;
}

Superop Superop::from_matrix(const Mat& s) {
    const auto d = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
    if (d * d != s.rows() || s.rows() != s.cols()) throw std::invalid_argument("Superop::from_matrix: not d^2 x d^2");
    return {d, [s, d](const Mat& x) {
                Vec v = s * Eigen::Map<const Vec>(x.data(), d * d);
                return Mat(Eigen::Map<Mat>(v.data(), d, d));
            }};
}

Superop Superop::identity(std::int64_t dim) {
    return {dim, [](const Mat& x) { return x; }};
}

Superop compose(const Superop& outer, const Superop& inner) {
    return {inner.dim, [outer, inner](const Mat& x) { return outer(inner(x)); }};
}

// ---------------------------------------------------------------------------
// tensor bookkeeping

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron_all(const std::vector<Mat>& factors) {
    if (factors.empty()) return Mat::Identity(1, 1);
    Mat out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
    return out;
}

namespace {

std::vector<std::int64_t> strides_of(const SpaceLayout& layout) {
    const int n = layout.num_sites();
    std::vector<std::int64_t> stride(static_cast<std::size_t>(n));
    std::int64_t acc = 1;
    for (int s = n - 1; s >= 0; --s) {
        stride[static_cast<std::size_t>(s)] = acc;
        acc *= layout.site_dim(s);
    }
    return stride;
}

void check_square(const Mat& o, const SpaceLayout& layout, const char* who) {
    if (o.rows() != layout.total_dim() || o.cols() != layout.total_dim())
        throw std::invalid_argument(std::string(who) + ": operator dimension does not match layout");
}

} // namespace

Mat partial_trace(const Mat& o, const SpaceLayout& layout, const std::vector<int>& keep) {
    check_square(o, layout, "partial_trace");
    return kernels::partial_trace(o, layout, keep);
}

Mat partial_transpose(const Mat& o, const SpaceLayout& layout, const std::vector<int>& sites) {
    check_square(o, layout, "partial_transpose");
    const auto stride = strides_of(layout);
    const std::int64_t d = layout.total_dim();
    std::vector<bool> sel(static_cast<std::size_t>(layout.num_sites()), false);
    for (int s : sites) sel.at(static_cast<std::size_t>(s)) = true;

    // index = selected part + remaining part
    std::vector<std::int64_t> sel_part(static_cast<std::size_t>(d)), rest_part(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < d; ++i) {
        std::int64_t rem = i, a = 0, b = 0;
        for (int s = 0; s < layout.num_sites(); ++s) {
            const auto st = stride[static_cast<std::size_t>(s)];
            const std::int64_t digit = rem / st;
            rem -= digit * st;
            (sel[static_cast<std::size_t>(s)] ? a : b) += digit * st;
        }
        sel_part[static_cast<std::size_t>(i)] = a;
        rest_part[static_cast<std::size_t>(i)] = b;
    }
    Mat out(d, d);
    for (std::int64_t j = 0; j < d; ++j)
        for (std::int64_t i = 0; i < d; ++i) {
            const auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
            out(rest_part[ii] + sel_part[jj], rest_part[jj] + sel_part[ii]) = o(i, j);
        }
    return out;
}

Mat permute_sites(const Mat& o, const SpaceLayout& layout, const std::vector<int>& perm) {
    check_square(o, layout, "permute_sites");
    const int n = layout.num_sites();
    if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permute_sites: permutation size");
    auto check = perm;
    std::sort(check.begin(), check.end());
    for (int k = 0; k < n; ++k)
        if (check[static_cast<std::size_t>(k)] != k) throw std::invalid_argument("permute_sites: not a permutation");

    const auto old_stride = strides_of(layout);
    std::vector<int> new_dims;
    for (int k : perm) new_dims.push_back(layout.site_dim(k));
    const auto new_stride = strides_of(SpaceLayout(new_dims));

    const std::int64_t d = layout.total_dim();
    std::vector<std::int64_t> map(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < d; ++i) {
        std::int64_t idx = 0;
        for (int k = 0; k < n; ++k) {
            const int s = perm[static_cast<std::size_t>(k)];
            const std::int64_t digit = (i / old_stride[static_cast<std::size_t>(s)]) % layout.site_dim(s);
            idx += digit * new_stride[static_cast<std::size_t>(k)];
        }
        map[static_cast<std::size_t>(i)] = idx;
    }
    Mat out(d, d);
    for (std::int64_t j = 0; j < d; ++j)
        for (std::int64_t i = 0; i < d; ++i)
            out(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = o(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// norms and spectra

double hermiticity_defect(const Mat& h) {
    if (h.size() == 0) return 0.0;
    // i(h - h^dag) is Hermitian, so its spectral radius is the operator norm
    const Mat skew = kI * (h - h.adjoint());
    return herm_eigenvalues(skew).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& h, double rel_tol) {
    if (h.rows() != h.cols()) return false;
    const double defect = hermiticity_defect(h);
    if (defect == 0.0) return true;
    return defect <= rel_tol * op_norm(h);
}

RVec herm_eigenvalues(const Mat& h) {
    Mat hs = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(hs, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double min_eigenvalue(const Mat& h) { return herm_eigenvalues(h).minCoeff(); }

double schatten1(const Mat& o) {
    if (o.size() == 0) return 0.0;
    const double scale = o.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    if (o.rows() == o.cols() && (o - o.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale)
        return herm_eigenvalues(o).cwiseAbs().sum();
    Eigen::BDCSVD<Mat> svd(o);
    return svd.singularValues().sum();
}

double op_norm(const Mat& o) {
    if (o.size() == 0) return 0.0;
    const double scale = o.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    if (o.rows() == o.cols() && (o - o.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale)
        return herm_eigenvalues(o).cwiseAbs().maxCoeff();
    Eigen::BDCSVD<Mat> svd(o);
    return svd.singularValues()(0);
}

Mat herm_exp(const Mat& h, cplx scale) {
    if (h.rows() != h.cols()) throw std::invalid_argument("herm_exp: matrix not square");
    if (!is_hermitian(h, 1e-9)) throw std::invalid_argument("herm_exp: matrix is not Hermitian");
    Mat hs = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(hs);
    const Vec phases = (scale * es.eigenvalues().cast<cplx>()).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double von_neumann_entropy(const Mat& rho) {
    const RVec ev = herm_eigenvalues(rho);
    double s = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        const double p = ev(k);
        if (p > 0.0) s -= p * std::log2(p);
    }
    return s;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Choi / Kraus

Mat choi(const Superop& s) {
    const std::int64_t d = s.dim;
    Mat c = Mat::Zero(d * d, d * d);
    for (std::int64_t i = 0; i < d; ++i)
        for (std::int64_t j = 0; j < d; ++j) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            c.block(i * d, j * d, d, d) = s(e);
        }
    return c;
}

Mat choi_output_trace(const Mat& c, std::int64_t dim) {
    Mat out(dim, dim);
    for (std::int64_t i = 0; i < dim; ++i)
        for (std::int64_t j = 0; j < dim; ++j) out(i, j) = c.block(i * dim, j * dim, dim, dim).trace();
    return out;
}

Superop kraus_superop(const std::vector<Mat>& kraus) {
    if (kraus.empty()) throw std::invalid_argument("kraus_superop: empty Kraus family");
    const auto d = kraus.front().cols();
    return {d, [kraus](const Mat& x) {
                Mat out = Mat::Zero(kraus.front().rows(), kraus.front().rows());
                for (const auto& k : kraus) out += k * x * k.adjoint();
                return out;
            }};
}

// ---------------------------------------------------------------------------
// random sampling

Mat ginibre(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Mat g(rows, cols);
    for (std::int64_t j = 0; j < cols; ++j)
        for (std::int64_t i = 0; i < rows; ++i) {
            const double re = n01(rng);
            const double im = n01(rng);
            g(i, j) = cplx(re, im) / std::sqrt(2.0);
        }
    return g;
}

Mat haar_unitary(std::int64_t dim, std::mt19937_64& rng) {
    Mat g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::int64_t k = 0; k < dim; ++k) {
        const cplx rk = r(k, k);
        const double a = std::abs(rk);
        if (a > 0.0) q.col(k) *= rk / a;
    }
    return q;
}

Vec random_pure(std::int64_t dim, std::mt19937_64& rng) {
    Mat g = ginibre(dim, 1, rng);
    Vec v = g.col(0);
    return v / v.norm();
}

Mat random_hermitian(std::int64_t dim, std::mt19937_64& rng) {
    Mat g = ginibre(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

} // namespace nzam
