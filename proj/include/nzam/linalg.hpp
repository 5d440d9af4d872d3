// linalg.hpp: dense complex linear algebra over site-factorized spaces

#pragma once

#include <random>
#include <vector>

#include "nzam/types.hpp"

namespace nzam {

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(const std::vector<Mat>& factors);

// Trace over every site not in `keep`. The output keeps the sites in
// ascending order. Throws std::invalid_argument if `keep` is empty.
Mat partial_trace(const Mat& o, const SpaceLayout& layout, const std::vector<int>& keep);

// Transpose on the sites listed in `sites` only.
Mat partial_transpose(const Mat& o, const SpaceLayout& layout, const std::vector<int>& sites);

// Reorder tensor factors: output site k is input site perm[k].
Mat permute_sites(const Mat& o, const SpaceLayout& layout, const std::vector<int>& perm);

double schatten1(const Mat& o);
double op_norm(const Mat& o);
double hermiticity_defect(const Mat& h);
bool is_hermitian(const Mat& h, double rel_tol = 1e-9);

// exp(scale * h) for Hermitian h via eigendecomposition. Rejects h with
// ||h - h^dag||_inf > 1e-9 ||h||_inf.
Mat herm_exp(const Mat& h, cplx scale);

// Eigenvalues of the Hermitian part, ascending.
RVec herm_eigenvalues(const Mat& h);
double min_eigenvalue(const Mat& h);

// -sum_k lambda_k log2 lambda_k with 0 log 0 := 0; eigenvalues clipped at 0.
double von_neumann_entropy(const Mat& rho);

Mat commutator(const Mat& a, const Mat& b);

// Choi matrix sum_ij |i><j| (x) s(|i><j|), input factor first.
Mat choi(const Superop& s);
// Tr_out of a Choi matrix; equals the identity iff the map is trace preserving.
Mat choi_output_trace(const Mat& c, std::int64_t dim);

Superop kraus_superop(const std::vector<Mat>& kraus);

// Random sampling helpers, all driven by an explicit engine.
Mat ginibre(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng);
Mat haar_unitary(std::int64_t dim, std::mt19937_64& rng);
Vec random_pure(std::int64_t dim, std::mt19937_64& rng);
Mat random_hermitian(std::int64_t dim, std::mt19937_64& rng);

} // namespace nzam
