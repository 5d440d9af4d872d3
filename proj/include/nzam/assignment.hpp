// assignment.hpp: CP assignment maps built from separable anchors, and the
// correlated projection superoperator baseline

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nzam/states.hpp"

namespace nzam {

struct BasisSearch {
    int random_bases = 64;
    std::uint64_t seed = 11;
    double member_tol = 1e-9; // |<psi|b>|^2 >= 1 - member_tol counts as "in the basis"
};

struct BasisChoice {
    Mat basis;                 // columns are the orthonormal basis vectors |i>
    double p_max = 0.0;        // weight of decomposition terms lying in the basis
    RVec p_s;                  // P_i^S = <i| sum_j P_j Pi_psi_j |i>
    std::vector<bool> support; // P_i^S above the cut
    bool restricted = false;   // some direction was dropped from the Kraus indices
    int candidates = 0;
};

inline constexpr double kNullDirection = 1e-12;

BasisChoice choose_basis(const SeparableDecomposition& d, const BasisSearch& search = {});
// Scores an explicit basis (columns) against a decomposition.
BasisChoice score_basis(const SeparableDecomposition& d, const Mat& basis, double member_tol = 1e-9);

struct KrausTerm {
    int basis_index = 0; // i
    int term = 0;        // j
    Mat m;               // sqrt(P_j |<psi_j|i>|^2 / P_i^S) |psi_j><i|
};

class AssignmentMap {
public:
    // Rejects vanishing P_i^S unless `choice.restricted` records the restriction;
    // restricted directions map to |i><i| (x) rho_bar_E (the anchor's E marginal).
    static AssignmentMap build(const SeparableDecomposition& d, const BasisChoice& choice);

    std::int64_t dim_s() const { return basis_.rows(); }
    std::int64_t dim_e() const { return dim_e_; }
    const Mat& basis() const { return basis_; }
    const std::vector<KrausTerm>& kraus() const { return kraus_; }
    const std::vector<Mat>& env_states() const { return env_; }
    const SeparableDecomposition& anchor() const { return anchor_; }
    const BasisChoice& choice() const { return choice_; }
    bool restricted() const { return choice_.restricted; }

    // sum_ij M_ij^dag M_ij plus the completion projectors
    Mat completeness() const;
    // A(rho_s) = sum_i <i|rho_s|i> R_i
    Mat apply(const Mat& rho_s) const;
    // Joint operators R_i; apply() is linear in the diagonal of rho_s in the basis.
    const std::vector<Mat>& responses() const { return response_; }
    // The same with every R_i reduced by `reduce` (e.g. a partial trace).
    std::vector<Mat> reduced_responses(const std::function<Mat(const Mat&)>& reduce) const;
    // Kraus form sum_ij M rho M^dag (x) rho_j^E, kept as an independent path for tests.
    Mat apply_kraus(const Mat& rho_s) const;

private:
    Mat basis_;
    std::int64_t dim_e_ = 0;
    std::vector<KrausTerm> kraus_;
    std::vector<Mat> env_;
    std::vector<int> completion_; // basis indices mapped to |i><i| (x) env_bar_
    Mat env_bar_;
    std::vector<Mat> response_;
    SeparableDecomposition anchor_;
    BasisChoice choice_;
};

// B = M o U o A on the system, with U acting on system (x) environment.
Superop dynamic_map(const AssignmentMap& a, const Mat& u);

// P rho = sum_i Tr_E{A_i rho} (x) B_i
struct ProjectionSuperop {
    std::vector<Mat> a_ops;
    std::vector<Mat> b_ops;

    std::int64_t dim_e() const { return a_ops.empty() ? 0 : a_ops.front().rows(); }
    // Largest violation of Tr{B_i A_j} = delta_ij and sum_i Tr(B_i) A_i = I.
    double defect() const;
    void validate(double tol = 1e-9) const;
    Mat apply(const Mat& rho, std::int64_t dim_s) const;
};

// Random valid projection with orthogonal projectors A_i (ranks drawn at
// random) and B_i = Pi_i tau_i Pi_i / Tr.
ProjectionSuperop random_projection(std::int64_t dim_e, std::mt19937_64& rng);
// A_1 = I_E, B_1 = rho_ref.
ProjectionSuperop standard_projection(const Mat& rho_ref);

} // namespace nzam
