#include "nzam/lattice.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "nzam/kernels.hpp"
#include "nzam/linalg.hpp"

namespace nzam {

namespace {

Mat pauli(char a) {
    Mat p = Mat::Zero(2, 2);
    switch (a) {
    case 'x': p(0, 1) = p(1, 0) = 1.0; break;
    case 'y': p(0, 1) = -kI; p(1, 0) = kI; break;
    case 'z': p(0, 0) = 1.0; p(1, 1) = -1.0; break;
    default: p = Mat::Identity(2, 2);
    }
    return p;
}

void check_bonds(const ChainModel& m, const SpaceLayout& layout, int first, int last) {
    if (first < 0 || last > m.num_bonds() || first > last) throw std::invalid_argument("liouvillian: bond range out of range");
    if (last > layout.num_sites() - 1) throw std::invalid_argument("liouvillian: bond outside the layout");
}

} // namespace

double ChainModel::coupling_bound() const {
    double j = 0.0;
    for (const auto& h : h_bond) j = std::max(j, op_norm(h));
    if (!h_bond.empty()) j = std::max(j, 2.0 * op_norm(h_bond.front()));
    return j;
}

Mat ChainModel::local_unitary(int site, double t) const {
    return herm_exp(h_local.at(static_cast<std::size_t>(site)), cplx(0.0, t));
}

Mat ChainModel::bond_at(int b, double t) const {
    const Mat& h = h_bond.at(static_cast<std::size_t>(b));
    if (t == 0.0) return h;
    const Mat u = kron(local_unitary(b, t), local_unitary(b + 1, t));
    return u * h * u.adjoint();
}

Mat ChainModel::h0() const {
    const auto d = layout.total_dim();
    Mat h = Mat::Zero(d, d);
    for (int s = 0; s < layout.num_sites(); ++s) h += kernels::serial::embed(h_local[static_cast<std::size_t>(s)], layout, s, 1);
    return h;
}

Mat ChainModel::hi() const {
    const auto d = layout.total_dim();
    Mat h = Mat::Zero(d, d);
    for (int b = 0; b < num_bonds(); ++b) h += kernels::serial::embed(h_bond[static_cast<std::size_t>(b)], layout, b, 2);
    return h;
}

ChainModel build_chain(const ChainSpec& spec) {
    if (spec.n_env < 1) throw std::invalid_argument("build_chain: need at least one environment site");
    if (spec.n_env > 11) throw std::invalid_argument("build_chain: joint dimension above 2^12");
    ChainModel m;
    m.spec = spec;
    m.layout = SpaceLayout::chain(spec.n_env);
    const int sites = spec.n_env + 1;
    const Mat sx = pauli('x'), sy = pauli('y'), sz = pauli('z');
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u11(-1.0, 1.0);

    for (int s = 0; s < sites; ++s) {
        if (spec.model == "tfim") {
            m.h_local.push_back(-spec.field * sx);
        } else if (spec.model == "xxz") {
            m.h_local.push_back(-spec.field * sz);
        } else if (spec.model == "random") {
            m.h_local.push_back(spec.field * (u11(rng) * sx + u11(rng) * sy + u11(rng) * sz));
        } else {
            throw std::invalid_argument("build_chain: unknown model \"" + spec.model + "\"");
        }
    }
    const char axes[3] = {'x', 'y', 'z'};
    for (int b = 0; b + 1 < sites; ++b) {
        Mat h;
        if (spec.model == "tfim") {
            h = -spec.coupling * kron(sz, sz);
        } else if (spec.model == "xxz") {
            h = spec.coupling * (kron(sx, sx) + kron(sy, sy) + spec.anisotropy * kron(sz, sz));
        } else {
            h = Mat::Zero(4, 4);
            for (char a : axes)
                for (char c : axes) h += spec.coupling * u11(rng) * kron(pauli(a), pauli(c));
        }
        if (b == 0) h *= spec.boundary;
        m.h_bond.push_back(h);
    }
    return m;
}

Mat liouvillian_on(const ChainModel& m, const SpaceLayout& layout, double t, int first, int last, const Mat& x,
                   bool hermitian) {
    check_bonds(m, layout, first, last);
    Mat y = Mat::Zero(x.rows(), x.cols());
    for (int b = first; b < last; ++b) kernels::accumulate_local_right(y, cplx(1.0), x, m.bond_at(b, t), layout, b, 2);
    if (hermitian) return -kI * (y.adjoint() - y);
    Mat z = Mat::Zero(x.rows(), x.cols());
    for (int b = first; b < last; ++b) z += kernels::apply_local_left(m.bond_at(b, t), layout, b, 2, x);
    return -kI * (z - y);
}

Mat liouvillian(const ChainModel& m, double t, int first, int last, const Mat& x, bool hermitian) {
    return liouvillian_on(m, m.layout, t, first, last, x, hermitian);
}

Mat reduce_to(const ChainModel& m, int n, const Mat& x) {
    if (n < 0 || n > m.n_env()) throw std::invalid_argument("reduce_to: depth out of range");
    if (n == m.n_env()) return x;
    return kernels::partial_trace(x, m.layout, m.layout.prefix(n));
}

Mat boundary_flow(const ChainModel& m, double t, const Mat& m1x) {
    const SpaceLayout two({2, 2});
    const Mat h = m.bond_at(0, t);
    const Mat c = -kI * (h * m1x - m1x * h);
    return kernels::partial_trace(c, two, {0});
}

Superop LiouvillePartition::total(double t) const {
    const auto* mm = model;
    return Superop{mm->layout.total_dim(), [mm, t](const Mat& x) { return liouvillian(*mm, t, 0, mm->num_bonds(), x); }};
}

Superop LiouvillePartition::head(int n, double t) const {
    const auto* mm = model;
    const int last = std::min(n, mm->num_bonds());
    return Superop{mm->layout.total_dim(), [mm, t, last](const Mat& x) { return liouvillian(*mm, t, 0, last, x); }};
}

Superop LiouvillePartition::bond(int n, double t) const {
    const auto* mm = model;
    if (n < 0 || n >= mm->num_bonds()) throw std::invalid_argument("LiouvillePartition::bond: no such bond");
    return Superop{mm->layout.total_dim(), [mm, t, n](const Mat& x) { return liouvillian(*mm, t, n, n + 1, x); }};
}

Superop LiouvillePartition::tail(int n, double t) const {
    const auto* mm = model;
    const int first = std::min(n + 1, mm->num_bonds());
    return Superop{mm->layout.total_dim(),
                   [mm, t, first](const Mat& x) { return liouvillian(*mm, t, first, mm->num_bonds(), x); }};
}

Superop LiouvillePartition::trace_to(int n) const {
    const auto* mm = model;
    return Superop{mm->layout.total_dim(), [mm, n](const Mat& x) { return reduce_to(*mm, n, x); }};
}

CommutatorBoundReport commutator_bound_check(const ChainModel& m, int n, int k, const Mat& o, double t) {
    if (n < 1 || n > m.num_bonds()) throw std::invalid_argument("commutator_bound_check: bond index out of range");
    if (k < 0 || k > m.n_env()) throw std::invalid_argument("commutator_bound_check: trace depth out of range");
    CommutatorBoundReport r;
    r.lhs = schatten1(reduce_to(m, k, liouvillian(m, t, n - 1, n, o)));
    r.rhs = 2.0 * op_norm(m.h_bond[static_cast<std::size_t>(n - 1)]) * schatten1(reduce_to(m, std::max(k, n), o));
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

} // namespace nzam
