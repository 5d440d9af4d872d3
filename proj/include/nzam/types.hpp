// types.hpp: core value types: dense operators, site layouts, superoperators

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nzam {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Ordered tensor-product structure of a Hilbert space. Site 0 is the slowest
// index of the flattened basis.
class SpaceLayout {
public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<int> site_dims, std::vector<std::string> labels = {});

    // Qubit chain "A, C1, ..., Cn".
    static SpaceLayout chain(int n_env, int local_dim = 2);

    int num_sites() const { return static_cast<int>(dims_.size()); }
    int site_dim(int s) const { return dims_.at(static_cast<std::size_t>(s)); }
    const std::vector<int>& site_dims() const { return dims_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::int64_t total_dim() const { return total_; }

    // Product of dims over a subset of sites.
    std::int64_t dim_of(const std::vector<int>& sites) const;
    // Layout restricted to the given sites (order preserved as passed).
    SpaceLayout subset(const std::vector<int>& sites) const;
    // Sites [0, n] inclusive.
    std::vector<int> prefix(int n) const;

private:
    std::vector<int> dims_;
    std::vector<std::string> labels_;
    std::int64_t total_ = 1;
};

// Linear map on dim x dim operators, held as a closure. The explicit
// dim^2 x dim^2 form uses column-major vectorization, vec(X)[i + j*dim] = X(i,j).
struct Superop {
    std::int64_t dim = 0;
    std::function<Mat(const Mat&)> action;

    Mat operator()(const Mat& x) const { return action(x); }
    Mat to_matrix() const;

    static Superop from_matrix(const Mat& s);
    static Superop identity(std::int64_t dim);
};

Superop compose(const Superop& outer, const Superop& inner);

} // namespace nzam
