#include "nzam/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nzam/linalg.hpp"

namespace nzam {

BipartiteState BipartiteState::of(const Mat& rho, int dim_a, int dim_b) {
    return BipartiteState{rho, SpaceLayout({dim_a, dim_b}, {"A", "B"}), {0}};
}

std::vector<int> BipartiteState::side_b() const {
    std::vector<int> out;
    for (int s = 0; s < layout.num_sites(); ++s)
        if (std::find(side_a.begin(), side_a.end(), s) == side_a.end()) out.push_back(s);
    return out;
}

std::int64_t BipartiteState::dim_a() const { return layout.dim_of(side_a); }
std::int64_t BipartiteState::dim_b() const { return layout.dim_of(side_b()); }

Mat BipartiteState::grouped() const {
    std::vector<int> perm = side_a;
    const auto b = side_b();
    perm.insert(perm.end(), b.begin(), b.end());
    bool identity = true;
    for (std::size_t k = 0; k < perm.size(); ++k) identity = identity && perm[k] == static_cast<int>(k);
    return identity ? rho : permute_sites(rho, layout, perm);
}

void BipartiteState::validate(double tol) const {
    if (rho.rows() != layout.total_dim() || rho.cols() != layout.total_dim())
        throw std::invalid_argument("BipartiteState: rho does not match the layout");
    if (side_a.empty() || static_cast<int>(side_a.size()) >= layout.num_sites())
        throw std::invalid_argument("BipartiteState: both sides of the cut must be non-empty");
    std::vector<int> seen(static_cast<std::size_t>(layout.num_sites()), 0);
    for (int s : side_a) {
        if (s < 0 || s >= layout.num_sites() || seen[static_cast<std::size_t>(s)]++)
            throw std::invalid_argument("BipartiteState: invalid cut");
    }
    if (!is_density_matrix(rho, tol)) throw std::invalid_argument("BipartiteState: rho is not a density matrix");
}

std::int64_t SeparableDecomposition::dim_a() const { return a_states.empty() ? 0 : a_states.front().size(); }
std::int64_t SeparableDecomposition::dim_b() const { return b_states.empty() ? 0 : b_states.front().rows(); }

Mat SeparableDecomposition::a_projector(std::size_t i) const { return pure_projector(a_states.at(i)); }

Mat SeparableDecomposition::reconstruct() const {
    const auto da = dim_a(), db = dim_b();
    Mat out = Mat::Zero(da * db, da * db);
    for (std::size_t i = 0; i < size(); ++i) out += weights[i] * kron(a_projector(i), b_states[i]);
    return out;
}

Mat SeparableDecomposition::a_marginal() const {
    const auto da = dim_a();
    Mat out = Mat::Zero(da, da);
    for (std::size_t i = 0; i < size(); ++i) out += weights[i] * a_projector(i);
    return out;
}

void SeparableDecomposition::validate(double tol) const {
    if (weights.empty() || a_states.size() != weights.size() || b_states.size() != weights.size())
        throw std::invalid_argument("SeparableDecomposition: inconsistent term counts");
    double total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("SeparableDecomposition: negative weight");
        total += weights[i];
        if (a_states[i].size() != dim_a() || b_states[i].rows() != dim_b())
            throw std::invalid_argument("SeparableDecomposition: mixed factor dimensions");
        if (std::abs(a_states[i].norm() - 1.0) > tol)
            throw std::invalid_argument("SeparableDecomposition: A factor is not normalized");
        if (!is_density_matrix(b_states[i], tol))
            throw std::invalid_argument("SeparableDecomposition: B factor is not a density matrix");
    }
    if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("SeparableDecomposition: weights do not sum to 1");
}

bool is_density_matrix(const Mat& rho, double tol) {
    if (rho.rows() != rho.cols() || rho.size() == 0) return false;
    if (!rho.allFinite()) return false;
    if (std::abs(rho.trace() - cplx(1.0)) > tol) return false;
    if (hermiticity_defect(rho) > tol) return false;
    return min_eigenvalue(rho) >= -tol;
}

double purity(const Mat& rho) { return (rho * rho).trace().real(); }

Mat random_state(const SpaceLayout& layout, int rank, std::uint64_t seed) {
    const auto d = layout.total_dim();
    if (rank < 1 || rank > d) throw std::invalid_argument("random_state: rank must lie in [1, dim]");
    std::mt19937_64 rng(seed);
    const Mat g = ginibre(d, rank, rng);
    Mat rho = g * g.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

SeparableDecomposition random_separable(int dim_a, int dim_b, int terms, std::mt19937_64& rng, int b_rank) {
    if (terms < 1) throw std::invalid_argument("random_separable: need at least one term");
    std::exponential_distribution<double> expo(1.0);
    SeparableDecomposition d;
    double total = 0.0;
    for (int i = 0; i < terms; ++i) {
        const double w = expo(rng);
        total += w;
        d.weights.push_back(w);
        d.a_states.push_back(random_pure(dim_a, rng));
        const Mat g = ginibre(dim_b, std::min(b_rank, dim_b), rng);
        Mat b = g * g.adjoint();
        d.b_states.push_back(b / b.trace());
    }
    for (auto& w : d.weights) w /= total;
    return d;
}

Mat pure_projector(const Vec& psi) { return psi * psi.adjoint(); }

Mat bell_state() {
    Vec v = Vec::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return pure_projector(v);
}

Mat singlet_state() {
    Vec v = Vec::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return pure_projector(v);
}

Mat werner_state(double p) { return p * singlet_state() + (1.0 - p) * Mat::Identity(4, 4) / 4.0; }

Vec ghz_vector(int n_sites) {
    if (n_sites < 1 || n_sites > 12) throw std::invalid_argument("ghz_vector: unsupported size");
    const std::int64_t d = std::int64_t{1} << n_sites;
    Vec v = Vec::Zero(d);
    v(0) = v(d - 1) = 1.0 / std::sqrt(2.0);
    return v;
}

Vec boundary_bell_vector(int n_env, const std::string& spread) {
    if (n_env < 1 || n_env > 11) throw std::invalid_argument("boundary_bell_vector: unsupported size");
    const std::int64_t de = std::int64_t{1} << n_env;
    Vec v = Vec::Zero(2 * de);
    const double r = 1.0 / std::sqrt(2.0);
    v(0) = r;
    if (spread == "none") {
        v(de + (std::int64_t{1} << (n_env - 1))) = r; // C1 is the slowest environment bit
    } else if (spread == "even") {
        const double w = r / std::sqrt(static_cast<double>(n_env));
        for (int i = 0; i < n_env; ++i) v(de + (std::int64_t{1} << i)) = w;
    } else {
        throw std::invalid_argument("boundary_bell_vector: spread must be \"none\" or \"even\"");
    }
    return v;
}

Vec product_vector(const std::vector<Vec>& sites) {
    Vec out = Vec::Ones(1);
    for (const auto& s : sites) {
        Vec next(out.size() * s.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * s.size(), s.size()) = out(i) * s;
        out = std::move(next);
    }
    return out;
}

} // namespace nzam
