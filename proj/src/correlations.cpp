#include "nzam/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "nzam/linalg.hpp"

namespace nzam {

namespace {

struct Grouped {
    Mat rho;
    std::int64_t da = 0, db = 0;
    SpaceLayout two;
};

Grouped group(const BipartiteState& s) {
    Grouped g;
    g.rho = s.grouped();
    g.da = s.dim_a();
    g.db = s.dim_b();
    g.two = SpaceLayout({static_cast<int>(g.da), static_cast<int>(g.db)});
    return g;
}

// Orthonormal qubit basis from Bloch angles.
Mat qubit_basis(double theta, double phi) {
    Mat u(2, 2);
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cplx e = std::polar(1.0, phi);
    u(0, 0) = c;
    u(1, 0) = e * s;
    u(0, 1) = -std::conj(e) * s;
    u(1, 1) = c;
    return u;
}

// Hermitian generator from m^2 real parameters.
Mat hermitian_from(const double* x, std::int64_t m) {
    Mat h = Mat::Zero(m, m);
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < m; ++i) h(i, i) = x[k++];
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = i + 1; j < m; ++j) {
            h(i, j) = cplx(x[k], x[k + 1]);
            h(j, i) = std::conj(h(i, j));
            k += 2;
        }
    return h;
}

struct RefineCtx {
    const Grouped* g;
    Side measured;
    Mat base;
};

double refine_objective(const gsl_vector* v, void* p) {
    const auto* ctx = static_cast<const RefineCtx*>(p);
    const std::int64_t m = ctx->base.rows();
    const Mat u = ctx->base * herm_exp(hermitian_from(v->data, m), kI);
    return conditional_entropy(ctx->g->rho, ctx->g->da, ctx->g->db, ctx->measured, u);
}

// Nelder-Mead over local unitary rotations of a seed basis.
double refine(const Grouped& g, Side measured, const Mat& seed, int iters) {
    const std::int64_t m = seed.rows();
    const auto n = static_cast<std::size_t>(m * m);
    RefineCtx ctx{&g, measured, seed};
    gsl_multimin_function f{&refine_objective, n, &ctx};
    gsl_vector* x = gsl_vector_calloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    gsl_vector_set_all(step, 0.2);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &f, x, step);
    for (int it = 0; it < iters; ++it) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-9) == GSL_SUCCESS) break;
    }
    const double best = s->fval;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return best;
}

} // namespace

double mutual_information(const BipartiteState& s) {
    const auto g = group(s);
    return von_neumann_entropy(partial_trace(g.rho, g.two, {0})) + von_neumann_entropy(partial_trace(g.rho, g.two, {1})) -
           von_neumann_entropy(g.rho);
}

double conditional_entropy(const Mat& grouped, std::int64_t da, std::int64_t db, Side measured, const Mat& basis) {
    const std::int64_t m = measured == Side::A ? da : db;
    const std::int64_t other = measured == Side::A ? db : da;
    if (basis.rows() != m || basis.cols() != m) throw std::invalid_argument("conditional_entropy: basis has wrong size");
    double total = 0.0;
    for (std::int64_t k = 0; k < m; ++k) {
        // V = |b_k> (x) I or I (x) |b_k>, columns span the unmeasured side
        Mat v = Mat::Zero(da * db, other);
        for (std::int64_t j = 0; j < other; ++j)
            for (std::int64_t i = 0; i < m; ++i) {
                if (measured == Side::A)
                    v(i * db + j, j) = basis(i, k);
                else
                    v(j * db + i, j) = basis(i, k);
            }
        Mat cond = v.adjoint() * grouped * v;
        const double p = cond.trace().real();
        if (p < 1e-15) continue;
        total += p * von_neumann_entropy(cond / p);
    }
    return total;
}

double discord(const BipartiteState& s, Side measured, const DiscordSearch& search) {
    const auto g = group(s);
    const std::int64_t m = measured == Side::A ? g.da : g.db;
    if (m < 2 || m > 4) throw std::invalid_argument("discord: measured side dimension must be 2, 3 or 4");
    const int seeds = m == 2 ? search.grid_theta * search.grid_phi : search.random_bases;
    if (search.grid_theta < 0 || search.grid_phi < 0 || search.random_bases < 0 || search.refine_iters < 0 ||
        search.refine_starts < 0)
        throw std::invalid_argument("discord: negative search setting");
    if (seeds == 0 && (search.refine_iters == 0 || search.refine_starts == 0))
        throw std::invalid_argument("discord: search budget is zero");

    const Mat marginal = partial_trace(g.rho, g.two, {measured == Side::A ? 0 : 1});
    const double base = von_neumann_entropy(marginal) - von_neumann_entropy(g.rho);

    std::vector<std::pair<double, Mat>> cands;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (marginal + marginal.adjoint()));
    cands.emplace_back(conditional_entropy(g.rho, g.da, g.db, measured, es.eigenvectors()), es.eigenvectors());
    if (m == 2) {
        for (int i = 0; i < search.grid_theta; ++i) {
            const double theta = M_PI * (i + 0.5) / search.grid_theta;
            for (int j = 0; j < search.grid_phi; ++j) {
                const Mat u = qubit_basis(theta, 2.0 * M_PI * j / search.grid_phi);
                cands.emplace_back(conditional_entropy(g.rho, g.da, g.db, measured, u), u);
            }
        }
    } else {
        std::mt19937_64 rng(search.seed);
        for (int r = 0; r < search.random_bases; ++r) {
            const Mat u = haar_unitary(m, rng);
            cands.emplace_back(conditional_entropy(g.rho, g.da, g.db, measured, u), u);
        }
    }
    // the marginal eigenbasis is always refined; then the best grid seeds
    double best = cands.front().first;
    std::stable_sort(cands.begin() + 1, cands.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    best = std::min(best, cands.size() > 1 ? cands[1].first : best);
    if (search.refine_iters > 0) {
        const std::size_t n_refine = std::min<std::size_t>(cands.size(), 1 + static_cast<std::size_t>(search.refine_starts));
        for (std::size_t c = 0; c < n_refine; ++c)
            best = std::min(best, refine(g, measured, cands[c].second, search.refine_iters));
    }
    return base + best;
}

PptResult ppt_check(const BipartiteState& s, double tol) {
    const auto g = group(s);
    PptResult r;
    r.min_eigenvalue = min_eigenvalue(partial_transpose(g.rho, g.two, {1}));
    r.separable = r.min_eigenvalue >= -tol;
    const auto lo = std::min(g.da, g.db), hi = std::max(g.da, g.db);
    r.exact = lo == 2 && hi <= 3;
    return r;
}

bool ppt_separable(const BipartiteState& s) { return ppt_check(s).separable; }

DfseBound dfse_bound(double dim_a, double dim_bd, double k) {
    if (dim_a < 2.0) throw std::invalid_argument("dfse_bound: dim_A must be at least 2");
    if (!(k > 0.0)) throw std::invalid_argument("dfse_bound: k must be positive");
    if (dim_bd < 0.0) throw std::invalid_argument("dfse_bound: dim_Bd must be non-negative");
    DfseBound b;
    if (std::isinf(k)) return b;
    b.raw = std::sqrt(918.0 * std::log(2.0) * dim_a * std::log2(dim_a)) * std::sqrt(dim_bd / k);
    b.capped = std::min(b.raw, kTrivialDistanceCap);
    return b;
}

} // namespace nzam
