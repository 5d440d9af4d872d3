// lattice.hpp: nearest-neighbour chains A - C1 - ... - CN in the interaction picture
//
// Bond b couples sites b and b + 1, so bond 0 is A-C1. M_n keeps sites 0..n.
// L_n sums the bonds b < n, the crossing bond of M_n is b = n and the tail is b > n.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nzam/types.hpp"

namespace nzam {

struct ChainSpec {
    std::string model = "tfim"; // tfim | xxz | random
    int n_env = 3;
    double coupling = 1.0;      // J of the bond terms
    double field = 0.5;         // g (tfim transverse field, random local scale) or h (xxz)
    double anisotropy = 1.0;    // xxz Delta
    double boundary = 1.0;      // extra factor on H_AC1
    std::uint64_t seed = 0;
};

struct ChainModel {
    ChainSpec spec;
    SpaceLayout layout;
    std::vector<Mat> h_local; // per site, 2x2
    std::vector<Mat> h_bond;  // per bond, 4x4 on (b, b + 1)

    int n_env() const { return layout.num_sites() - 1; }
    int num_bonds() const { return static_cast<int>(h_bond.size()); }

    // max{max_b ||H_b||, 2 ||H_AC1||}
    double coupling_bound() const;
    Mat local_unitary(int site, double t) const; // exp(i h_s t)
    Mat bond_at(int b, double t) const;          // interaction-picture bond term
    Mat h0() const;                              // dense, tests only
    Mat hi() const;                              // dense, tests only
};

ChainModel build_chain(const ChainSpec& spec);

// -i sum_{b in [first, last)} [H_b(t), X] on `layout`, which must contain the
// sites of those bonds as its leading sites (defaults to the full chain).
// The Hermitian path needs a single right-multiply sweep.
Mat liouvillian(const ChainModel& m, double t, int first, int last, const Mat& x, bool hermitian = false);
Mat liouvillian_on(const ChainModel& m, const SpaceLayout& layout, double t, int first, int last, const Mat& x,
                   bool hermitian = false);

// M_n X: trace out sites n + 1 .. N.
Mat reduce_to(const ChainModel& m, int n, const Mat& x);
// M_0 L_1(t) X computed from M_1 X alone.
Mat boundary_flow(const ChainModel& m, double t, const Mat& m1x);

struct LiouvillePartition {
    const ChainModel* model = nullptr;

    Superop total(double t) const;
    Superop head(int n, double t) const;     // L_n, bonds b < n
    Superop bond(int n, double t) const;     // L_{n,n+1}, bond n
    Superop tail(int n, double t) const;     // bonds b > n
    Superop boundary(double t) const { return bond(0, t); }
    Superop trace_to(int n) const;           // M_n, as a map on the full space (output on sites 0..n)
};

struct CommutatorBoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// ||M_k L_{n-1,n}(t) O||_1 <= 2 ||H_{n-1,n}|| ||M_max(k,n) O||_1
CommutatorBoundReport commutator_bound_check(const ChainModel& m, int n, int k, const Mat& o, double t);

} // namespace nzam
