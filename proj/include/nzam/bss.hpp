// bss.hpp: best separable state in Schatten-1 distance

#pragma once

#include <cstdint>

#include "nzam/states.hpp"

namespace nzam {

struct BssSettings {
    int n_terms = 0; // 0 selects (dim_a dim_b)^2, capped at max_terms
    int max_terms = 64;
    int restarts = 8;
    int max_iters = 400;
    double tol = 1e-8;
    std::uint64_t seed = 1;
};

struct BssResult {
    SeparableDecomposition decomposition;
    double distance = 0.0;
    int restarts_used = 0;
    int best_restart = 0;
    int iterations = 0;
    bool converged = false;
    bool certified = false; // distance reached tol
};

// The decomposition's A states live on the side-A sites of s (grouped order).
BssResult best_separable_state(const BipartiteState& s, const BssSettings& settings = {});

} // namespace nzam
