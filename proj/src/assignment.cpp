#include "nzam/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nzam/linalg.hpp"

namespace nzam {

namespace {

void check_decomposition(const SeparableDecomposition& d) {
    d.validate(1e-8);
}

Mat gram_schmidt(const std::vector<Vec>& seq, std::int64_t dim) {
    Mat basis(dim, 0);
    auto push = [&](Vec v) {
        if (basis.cols() == dim) return;
        if (basis.cols() > 0) v -= basis * (basis.adjoint() * v);
        if (basis.cols() > 0) v -= basis * (basis.adjoint() * v); // second pass for stability
        const double n = v.norm();
        if (n < 1e-8) return;
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = v / n;
    };
    for (const auto& v : seq) push(v);
    for (std::int64_t i = 0; i < dim && basis.cols() < dim; ++i) push(Vec::Unit(dim, i));
    return basis;
}

} // namespace

BasisChoice score_basis(const SeparableDecomposition& d, const Mat& basis, double member_tol) {
    const std::int64_t n = d.dim_a();
    if (basis.rows() != n || basis.cols() != n) throw std::invalid_argument("score_basis: basis has wrong shape");
    if ((basis.adjoint() * basis - Mat::Identity(n, n)).norm() > 1e-9)
        throw std::invalid_argument("score_basis: basis is not orthonormal");
    BasisChoice c;
    c.basis = basis;
    c.p_s = RVec::Zero(n);
    for (std::size_t j = 0; j < d.size(); ++j) {
        const RVec overlap = (basis.adjoint() * d.a_states[j]).cwiseAbs2();
        c.p_s += d.weights[j] * overlap;
        if (overlap.maxCoeff() >= 1.0 - member_tol) c.p_max += d.weights[j];
    }
    c.support.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        c.support[static_cast<std::size_t>(i)] = c.p_s(i) > kNullDirection;
        if (!c.support[static_cast<std::size_t>(i)]) c.restricted = true;
    }
    c.candidates = 1;
    return c;
}

BasisChoice choose_basis(const SeparableDecomposition& d, const BasisSearch& search) {
    check_decomposition(d);
    const std::int64_t n = d.dim_a();
    std::vector<Mat> cands;
    {
        const Mat marg = d.a_marginal();
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (marg + marg.adjoint()));
        // descending weight first, so the dominant directions come first
        cands.push_back(es.eigenvectors().rowwise().reverse());
    }
    for (std::size_t j = 0; j < d.size(); ++j) {
        std::vector<Vec> seq{d.a_states[j]};
        for (std::size_t k = 0; k < d.size(); ++k)
            if (k != j) seq.push_back(d.a_states[k]);
        cands.push_back(gram_schmidt(seq, n));
    }
    std::mt19937_64 rng(search.seed);
    for (int r = 0; r < search.random_bases; ++r) cands.push_back(haar_unitary(n, rng));

    BasisChoice best;
    bool have = false;
    for (const auto& b : cands) {
        auto c = score_basis(d, b, search.member_tol);
        if (!have || c.p_max > best.p_max + 1e-12) {
            best = std::move(c);
            have = true;
        }
    }
    best.candidates = static_cast<int>(cands.size());
    return best;
}

AssignmentMap AssignmentMap::build(const SeparableDecomposition& d, const BasisChoice& choice) {
    check_decomposition(d);
    const std::int64_t n = d.dim_a();
    const auto scored = score_basis(d, choice.basis);
    AssignmentMap a;
    a.basis_ = choice.basis;
    a.dim_e_ = d.dim_b();
    a.env_ = d.b_states;
    a.anchor_ = d;
    a.choice_ = scored;
    a.choice_.candidates = choice.candidates;
    a.env_bar_ = Mat::Zero(a.dim_e_, a.dim_e_);
    for (std::size_t j = 0; j < d.size(); ++j) a.env_bar_ += d.weights[j] * d.b_states[j];

    for (std::int64_t i = 0; i < n; ++i) {
        const Vec bi = choice.basis.col(i);
        const double psi = scored.p_s(i);
        Mat resp = Mat::Zero(n * a.dim_e_, n * a.dim_e_);
        if (psi <= kNullDirection) {
            if (!choice.restricted)
                throw std::invalid_argument("AssignmentMap::build: P_i^S vanishes for basis direction " +
                                            std::to_string(i) + " and the basis choice records no restriction");
            a.completion_.push_back(static_cast<int>(i));
            resp = kron(bi * bi.adjoint(), a.env_bar_);
        } else {
            for (std::size_t j = 0; j < d.size(); ++j) {
                const double c = d.weights[j] * std::norm(d.a_states[j].dot(bi)) / psi;
                if (c <= 0.0) continue;
                a.kraus_.push_back({static_cast<int>(i), static_cast<int>(j),
                                    std::sqrt(c) * d.a_states[j] * bi.adjoint()});
                resp += c * kron(pure_projector(d.a_states[j]), d.b_states[j]);
            }
        }
        a.response_.push_back(std::move(resp));
    }
    return a;
}

Mat AssignmentMap::completeness() const {
    const auto n = dim_s();
    Mat c = Mat::Zero(n, n);
    for (const auto& k : kraus_) c += k.m.adjoint() * k.m;
    for (int i : completion_) c += basis_.col(i) * basis_.col(i).adjoint();
    return c;
}

Mat AssignmentMap::apply(const Mat& rho_s) const {
    if (rho_s.rows() != dim_s() || rho_s.cols() != dim_s())
        throw std::invalid_argument("AssignmentMap::apply: dimension mismatch");
    const auto d = dim_s() * dim_e_;
    Mat out = Mat::Zero(d, d);
    for (std::int64_t i = 0; i < dim_s(); ++i) {
        const cplx w = basis_.col(i).dot(rho_s * basis_.col(i));
        if (w != cplx(0.0)) out += w * response_[static_cast<std::size_t>(i)];
    }
    return out;
}

std::vector<Mat> AssignmentMap::reduced_responses(const std::function<Mat(const Mat&)>& reduce) const {
    std::vector<Mat> out;
    out.reserve(response_.size());
    for (const auto& r : response_) out.push_back(reduce(r));
    return out;
}

Mat AssignmentMap::apply_kraus(const Mat& rho_s) const {
    if (rho_s.rows() != dim_s() || rho_s.cols() != dim_s())
        throw std::invalid_argument("AssignmentMap::apply_kraus: dimension mismatch");
    const auto d = dim_s() * dim_e_;
    Mat out = Mat::Zero(d, d);
    for (const auto& k : kraus_) out += kron(k.m * rho_s * k.m.adjoint(), env_[static_cast<std::size_t>(k.term)]);
    for (int i : completion_) {
        const Mat p = basis_.col(i) * basis_.col(i).adjoint();
        out += kron(p * rho_s * p, env_bar_);
    }
    return out;
}

Superop dynamic_map(const AssignmentMap& a, const Mat& u) {
    const auto ds = a.dim_s(), de = a.dim_e();
    if (u.rows() != ds * de || u.cols() != ds * de) throw std::invalid_argument("dynamic_map: unitary has wrong size");
    if ((u * u.adjoint() - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("dynamic_map: operator is not unitary");
    const SpaceLayout layout({static_cast<int>(ds), static_cast<int>(de)});
    return Superop{ds, [&a, u, layout](const Mat& x) { return partial_trace(u * a.apply(x) * u.adjoint(), layout, {0}); }};
}

double ProjectionSuperop::defect() const {
    const auto n = a_ops.size();
    const auto de = dim_e();
    double worst = 0.0;
    Mat sum = Mat::Zero(de, de);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const cplx v = (b_ops[i] * a_ops[j]).trace();
            worst = std::max(worst, std::abs(v - cplx(i == j ? 1.0 : 0.0)));
        }
        sum += b_ops[i].trace() * a_ops[i];
    }
    return std::max(worst, (sum - Mat::Identity(de, de)).cwiseAbs().maxCoeff());
}

void ProjectionSuperop::validate(double tol) const {
    if (a_ops.empty() || a_ops.size() != b_ops.size())
        throw std::invalid_argument("ProjectionSuperop: A and B families must be non-empty and of equal size");
    for (std::size_t i = 0; i < a_ops.size(); ++i)
        if (a_ops[i].rows() != dim_e() || a_ops[i].cols() != dim_e() || b_ops[i].rows() != dim_e() ||
            b_ops[i].cols() != dim_e())
            throw std::invalid_argument("ProjectionSuperop: operator dimensions differ");
    if (defect() > tol) throw std::invalid_argument("ProjectionSuperop: biorthogonality or completeness violated");
}

Mat ProjectionSuperop::apply(const Mat& rho, std::int64_t dim_s) const {
    const auto de = dim_e();
    if (rho.rows() != dim_s * de || rho.cols() != dim_s * de)
        throw std::invalid_argument("ProjectionSuperop::apply: dimension mismatch");
    const SpaceLayout layout({static_cast<int>(dim_s), static_cast<int>(de)});
    const Mat id = Mat::Identity(dim_s, dim_s);
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < a_ops.size(); ++i)
        out += kron(partial_trace(kron(id, a_ops[i]) * rho, layout, {0}), b_ops[i]);
    return out;
}

ProjectionSuperop random_projection(std::int64_t dim_e, std::mt19937_64& rng) {
    const Mat u = haar_unitary(dim_e, rng);
    std::uniform_int_distribution<std::int64_t> ngroups(1, dim_e);
    const auto g = ngroups(rng);
    std::uniform_int_distribution<std::int64_t> pick(0, g - 1);
    std::vector<std::vector<std::int64_t>> groups(static_cast<std::size_t>(g));
    for (std::int64_t c = 0; c < dim_e; ++c)
        groups[static_cast<std::size_t>(c < g ? c : pick(rng))].push_back(c);
    ProjectionSuperop p;
    for (const auto& grp : groups) {
        Mat proj = Mat::Zero(dim_e, dim_e);
        for (auto c : grp) proj += u.col(c) * u.col(c).adjoint();
        const Mat gm = ginibre(dim_e, dim_e, rng);
        Mat tau = proj * (gm * gm.adjoint()) * proj;
        tau /= tau.trace();
        p.a_ops.push_back(proj);
        p.b_ops.push_back(0.5 * (tau + tau.adjoint()));
    }
    return p;
}

ProjectionSuperop standard_projection(const Mat& rho_ref) {
    return ProjectionSuperop{{Mat::Identity(rho_ref.rows(), rho_ref.cols())}, {rho_ref}};
}

} // namespace nzam
