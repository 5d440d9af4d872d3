// states.hpp: bipartite states, separable decompositions and generators

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nzam/types.hpp"

namespace nzam {

// A density matrix together with its site structure and an A|B cut.
struct BipartiteState {
    Mat rho;
    SpaceLayout layout;
    std::vector<int> side_a; // sites on side A; every other site is on side B

    // Two-site state of dims (dim_a, dim_b).
    static BipartiteState of(const Mat& rho, int dim_a, int dim_b);

    std::vector<int> side_b() const;
    std::int64_t dim_a() const;
    std::int64_t dim_b() const;
    // rho with the side-A sites moved in front, as a (dim_a * dim_b) matrix.
    Mat grouped() const;
    void validate(double tol = 1e-10) const;
};

// sum_i P_i |a_i><a_i| (x) rho_i^B
struct SeparableDecomposition {
    std::vector<double> weights;
    std::vector<Vec> a_states; // normalized pure states on side A
    std::vector<Mat> b_states; // density matrices on side B

    std::size_t size() const { return weights.size(); }
    std::int64_t dim_a() const;
    std::int64_t dim_b() const;
    Mat a_projector(std::size_t i) const;
    Mat reconstruct() const;
    Mat a_marginal() const;
    void validate(double tol = 1e-9) const;
};

bool is_density_matrix(const Mat& rho, double tol = 1e-10);
double purity(const Mat& rho);

// Ginibre-induced state of the given rank, reproducible per seed.
Mat random_state(const SpaceLayout& layout, int rank, std::uint64_t seed);

SeparableDecomposition random_separable(int dim_a, int dim_b, int terms, std::mt19937_64& rng,
                                        int b_rank = 1);

Mat pure_projector(const Vec& psi);
Mat bell_state(); // |Phi+> = (|00> + |11>)/sqrt 2
Mat singlet_state();
// p |Psi-><Psi-| + (1 - p) I/4
Mat werner_state(double p);

// Chain states on n_env + 1 qubits, site 0 is A.
Vec ghz_vector(int n_sites);
// (|0>|0...0> + |1>|b>)/sqrt 2 where |b> = |10...0> for spread "none" and the
// W state over all n_env sites for spread "even".
Vec boundary_bell_vector(int n_env, const std::string& spread);
Vec product_vector(const std::vector<Vec>& sites);

} // namespace nzam
