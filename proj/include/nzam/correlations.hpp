// correlations.hpp: entropic correlation measures and separability tests

#pragma once

#include <cstdint>

#include "nzam/states.hpp"

namespace nzam {

double mutual_information(const BipartiteState& s);

enum class Side { A, B };

struct DiscordSearch {
    int grid_theta = 64;     // qubit grid over the Bloch sphere
    int grid_phi = 32;
    int random_bases = 64;   // seeds for measured dimension 3 or 4
    int refine_iters = 2000; // Nelder-Mead budget per refinement
    int refine_starts = 4;   // best seeds refined
    std::uint64_t seed = 7;
};

// S(measured) - S(joint) + min over rank-1 projective measurements on the
// measured side of the conditional entropy of the other side. The minimum is
// searched, so the value is an upper bound on the discord.
double discord(const BipartiteState& s, Side measured, const DiscordSearch& search = {});

// Conditional entropy sum_k p_k S(rho_k) after measuring `measured` in the
// orthonormal basis given by the columns of `basis`.
double conditional_entropy(const Mat& grouped, std::int64_t dim_a, std::int64_t dim_b, Side measured,
                           const Mat& basis);

struct PptResult {
    bool separable = false;
    bool exact = false; // the verdict is only necessary beyond 2x2 and 2x3
    double min_eigenvalue = 0.0;
};

PptResult ppt_check(const BipartiteState& s, double tol = 1e-10);
bool ppt_separable(const BipartiteState& s);

struct DfseBound {
    double raw = 0.0;
    double capped = 0.0;
};

inline constexpr double kTrivialDistanceCap = 2.0;

DfseBound dfse_bound(double dim_a, double dim_bd, double k);

} // namespace nzam
