#include "nzam/bss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nzam/linalg.hpp"

namespace nzam {

namespace {

using RMat = Eigen::MatrixXd;

constexpr double kSupportCut = 1e-12;

// Product-term model sigma = S / Tr S with S = sum_k a_k a_k^dag (x) b_k b_k^dag,
// parameters stored as [Re a_k, Im a_k, Re b_k, Im b_k] per term.
struct Model {
    std::int64_t da = 0, db = 0;
    int terms = 0;

    std::int64_t per_term() const { return 2 * (da + db); }
    std::int64_t size() const { return per_term() * terms; }

    Vec a(const RVec& p, int k) const {
        const std::int64_t o = k * per_term();
        Vec v(da);
        for (std::int64_t i = 0; i < da; ++i) v(i) = cplx(p(o + i), p(o + da + i));
        return v;
    }
    Vec b(const RVec& p, int k) const {
        const std::int64_t o = k * per_term() + 2 * da;
        Vec v(db);
        for (std::int64_t i = 0; i < db; ++i) v(i) = cplx(p(o + i), p(o + db + i));
        return v;
    }
    void set(RVec& p, int k, const Vec& a, const Vec& b) const {
        const std::int64_t o = k * per_term();
        for (std::int64_t i = 0; i < da; ++i) {
            p(o + i) = a(i).real();
            p(o + da + i) = a(i).imag();
        }
        for (std::int64_t i = 0; i < db; ++i) {
            p(o + 2 * da + i) = b(i).real();
            p(o + 2 * da + db + i) = b(i).imag();
        }
    }

    Mat sigma(const RVec& p) const {
        Mat s = Mat::Zero(da * db, da * db);
        for (int k = 0; k < terms; ++k) {
            const Vec av = a(p, k), bv = b(p, k);
            s += kron(av * av.adjoint(), bv * bv.adjoint());
        }
        const double t = s.trace().real();
        return s / t;
    }
};

RVec to_real(const Mat& m) {
    RVec r(2 * m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        r(2 * i) = m.data()[i].real();
        r(2 * i + 1) = m.data()[i].imag();
    }
    return r;
}

// Residual (sigma - rho) wh and its Jacobian with respect to the parameters.
struct Linearization {
    RVec r;
    RMat jac;
};

Linearization linearize(const Model& mdl, const RVec& p, const Mat& rho, const Mat* wh) {
    const std::int64_t d = mdl.da * mdl.db;
    std::vector<Mat> ak(static_cast<std::size_t>(mdl.terms)), bk(ak.size());
    Mat s = Mat::Zero(d, d);
    for (int k = 0; k < mdl.terms; ++k) {
        const Vec av = mdl.a(p, k), bv = mdl.b(p, k);
        ak[static_cast<std::size_t>(k)] = av * av.adjoint();
        bk[static_cast<std::size_t>(k)] = bv * bv.adjoint();
        s += kron(ak[static_cast<std::size_t>(k)], bk[static_cast<std::size_t>(k)]);
    }
    const double t = s.trace().real();
    const Mat sigma = s / t;
    Linearization lin;
    const Mat res = sigma - rho;
    lin.r = to_real(wh ? Mat(res * *wh) : res);
    lin.jac.resize(2 * d * d, mdl.size());

    for (int k = 0; k < mdl.terms; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const Vec av = mdl.a(p, k), bv = mdl.b(p, k);
        const double tra = ak[ku].trace().real(), trb = bk[ku].trace().real();
        const std::int64_t o = k * mdl.per_term();
        auto emit = [&](std::int64_t col, const Mat& ds, double dt) {
            Mat dsig = (ds - sigma * dt) / t;
            lin.jac.col(col) = to_real(wh ? Mat(dsig * *wh) : dsig);
        };
        for (std::int64_t m = 0; m < mdl.da; ++m) {
            Mat dre = Mat::Zero(mdl.da, mdl.da);
            dre.row(m) += av.adjoint();
            dre.col(m) += av;
            Mat dim = Mat::Zero(mdl.da, mdl.da);
            dim.row(m) += kI * av.adjoint();
            dim.col(m) -= kI * av;
            emit(o + m, kron(dre, bk[ku]), dre.trace().real() * trb);
            emit(o + mdl.da + m, kron(dim, bk[ku]), dim.trace().real() * trb);
        }
        for (std::int64_t m = 0; m < mdl.db; ++m) {
            Mat dre = Mat::Zero(mdl.db, mdl.db);
            dre.row(m) += bv.adjoint();
            dre.col(m) += bv;
            Mat dim = Mat::Zero(mdl.db, mdl.db);
            dim.row(m) += kI * bv.adjoint();
            dim.col(m) -= kI * bv;
            emit(o + 2 * mdl.da + m, kron(ak[ku], dre), tra * dre.trace().real());
            emit(o + 2 * mdl.da + mdl.db + m, kron(ak[ku], dim), tra * dim.trace().real());
        }
    }
    return lin;
}

double weighted_cost(const Model& mdl, const RVec& p, const Mat& rho, const Mat* wh) {
    const Mat res = mdl.sigma(p) - rho;
    return 0.5 * (wh ? Mat(res * *wh) : res).squaredNorm();
}

struct LmOutcome {
    int iterations = 0;
    bool converged = false;
};

// Levenberg-Marquardt on 0.5 ||(sigma(p) - rho) wh||_F^2.
LmOutcome levenberg_marquardt(const Model& mdl, RVec& p, const Mat& rho, const Mat* wh, int max_iters,
                              double cost_floor) {
    LmOutcome out;
    double cost = weighted_cost(mdl, p, rho, wh);
    double lambda = -1.0;
    int stalls = 0;
    while (out.iterations < max_iters) {
        if (cost <= cost_floor) {
            out.converged = true;
            break;
        }
        ++out.iterations;
        const auto lin = linearize(mdl, p, rho, wh);
        const RVec g = lin.jac.transpose() * lin.r;
        const bool dual = lin.jac.cols() > lin.jac.rows();
        const RMat gram = dual ? RMat(lin.jac * lin.jac.transpose()) : RMat(lin.jac.transpose() * lin.jac);
        if (lambda < 0.0) lambda = 1e-3 * std::max(gram.diagonal().maxCoeff(), 1e-300);
        bool accepted = false;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            RMat a = gram;
            a.diagonal().array() += lambda;
            Eigen::LDLT<RMat> ldlt(a);
            RVec step = dual ? RVec(-lin.jac.transpose() * ldlt.solve(lin.r)) : RVec(-ldlt.solve(g));
            const RVec trial = p + step;
            const double trial_cost = weighted_cost(mdl, trial, rho, wh);
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double gain = (cost - trial_cost) / std::max(cost, 1e-300);
                p = trial;
                cost = trial_cost;
                lambda = std::max(lambda * 0.3, 1e-15);
                accepted = true;
                stalls = gain < 1e-10 ? stalls + 1 : 0;
                if (step.norm() <= 1e-13 * (1.0 + p.norm())) stalls = 3;
            } else {
                lambda *= 4.0;
            }
        }
        if (!accepted || stalls >= 3) {
            out.converged = true;
            break;
        }
    }
    return out;
}

// Keep the parameter scale near one; sigma is invariant under this.
void rescale(const Model& mdl, RVec& p) {
    double total = 0.0;
    for (int k = 0; k < mdl.terms; ++k) total += mdl.a(p, k).squaredNorm() * mdl.b(p, k).squaredNorm();
    if (total <= 0.0) return;
    const double f = std::pow(total, -0.25);
    p *= f;
}

struct Attempt {
    RVec p;
    double distance = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

Attempt optimize(const Model& mdl, RVec p, const Mat& rho, const BssSettings& st) {
    Attempt at;
    rescale(mdl, p);
    auto lm = levenberg_marquardt(mdl, p, rho, nullptr, st.max_iters, 0.125 * st.tol * st.tol / rho.rows());
    at.iterations += lm.iterations;
    at.converged = lm.converged;
    at.p = p;
    at.distance = schatten1(mdl.sigma(p) - rho);
    if (at.distance <= st.tol) return at;

    // reweighted least squares towards the Schatten-1 minimum
    double eps = std::max(at.distance / static_cast<double>(rho.rows()), 1e-3);
    const int inner = std::max(5, st.max_iters / 20);
    for (int round = 0; round < 40 && eps > 1e-10; ++round) {
        const Mat res = mdl.sigma(p) - rho;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (res + res.adjoint()));
        const RVec w = (es.eigenvalues().array().square() + eps * eps).pow(-0.25);
        const Mat wh = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
        rescale(mdl, p);
        lm = levenberg_marquardt(mdl, p, rho, &wh, inner, 0.0);
        at.iterations += lm.iterations;
        const double dist = schatten1(mdl.sigma(p) - rho);
        if (dist < at.distance) {
            at.distance = dist;
            at.p = p;
        }
        if (at.distance <= st.tol) break;
        eps *= 0.5;
    }
    return at;
}

RVec cq_seed(const Model& mdl, const Mat& rho, std::mt19937_64& rng) {
    // rho_A is diagonal in the reduced coordinates; dephase in that basis
    std::vector<std::pair<Vec, Vec>> terms;
    for (std::int64_t i = 0; i < mdl.da; ++i) {
        const Mat block = rho.block(i * mdl.db, i * mdl.db, mdl.db, mdl.db);
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (block + block.adjoint()));
        for (std::int64_t k = mdl.db - 1; k >= 0; --k) {
            const double mu = es.eigenvalues()(k);
            if (mu <= 0.0) continue;
            terms.emplace_back(Vec::Unit(mdl.da, i), std::sqrt(mu) * es.eigenvectors().col(k));
        }
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& x, const auto& y) { return x.second.squaredNorm() > y.second.squaredNorm(); });
    RVec p(mdl.size());
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int k = 0; k < mdl.terms; ++k) {
        if (static_cast<std::size_t>(k) < terms.size()) {
            mdl.set(p, k, terms[static_cast<std::size_t>(k)].first, terms[static_cast<std::size_t>(k)].second);
        } else {
            // small random filler terms that the optimizer can grow
            Vec a(mdl.da), b(mdl.db);
            for (auto& x : a) x = cplx(n01(rng), n01(rng));
            for (auto& x : b) x = 1e-2 * cplx(n01(rng), n01(rng)) / std::sqrt(static_cast<double>(mdl.db));
            mdl.set(p, k, a / a.norm(), b);
        }
    }
    return p;
}

RVec random_seed(const Model& mdl, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    RVec p(mdl.size());
    for (auto& x : p) x = n01(rng);
    return p;
}

Mat isometry_on_support(const Mat& marginal, RVec* weights = nullptr) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (marginal + marginal.adjoint()));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
        if (es.eigenvalues()(i) > kSupportCut) keep.push_back(i);
    Mat u(marginal.rows(), static_cast<Eigen::Index>(keep.size()));
    if (weights) weights->resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        u.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
        if (weights) (*weights)(static_cast<Eigen::Index>(c)) = es.eigenvalues()(keep[c]);
    }
    return u;
}

void finalize(SeparableDecomposition& d) {
    SeparableDecomposition out;
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d.weights[i] > 1e-300)) continue;
        out.weights.push_back(d.weights[i]);
        out.a_states.push_back(d.a_states[i]);
        out.b_states.push_back(d.b_states[i]);
        total += d.weights[i];
    }
    for (auto& w : out.weights) w /= total;
    d = std::move(out);
}

} // namespace

BssResult best_separable_state(const BipartiteState& s, const BssSettings& st) {
    if (st.restarts < 1) throw std::invalid_argument("best_separable_state: restarts must be at least 1");
    if (st.max_iters < 1) throw std::invalid_argument("best_separable_state: max_iters must be at least 1");
    if (!(st.tol > 0.0)) throw std::invalid_argument("best_separable_state: tol must be positive");
    s.validate(1e-8);

    const Mat rho = s.grouped();
    const std::int64_t da = s.dim_a(), db = s.dim_b();
    const SpaceLayout two({static_cast<int>(da), static_cast<int>(db)});
    RVec wa;
    const Mat ua = isometry_on_support(partial_trace(rho, two, {0}), &wa);
    const Mat ub = isometry_on_support(partial_trace(rho, two, {1}));
    const Mat u = kron(ua, ub);
    Mat red = u.adjoint() * rho * u;
    red = 0.5 * (red + red.adjoint());
    red /= red.trace().real();

    BssResult result;
    SeparableDecomposition& dec = result.decomposition;
    const std::int64_t ra = ua.cols(), rb = ub.cols();

    if (ra == 1 || rb == 1) {
        // one side is pure, so the state is a product
        if (ra == 1) {
            dec.weights = {1.0};
            dec.a_states = {ua.col(0)};
            dec.b_states = {ub * red * ub.adjoint()};
        } else {
            const Mat bproj = ub * ub.adjoint();
            for (Eigen::Index i = 0; i < wa.size(); ++i) {
                dec.weights.push_back(wa(i));
                dec.a_states.push_back(ua.col(i));
                dec.b_states.push_back(bproj);
            }
        }
        finalize(dec);
        result.distance = schatten1(rho - dec.reconstruct());
        result.restarts_used = 0;
        result.converged = true;
        result.certified = result.distance <= st.tol;
        return result;
    }

    Model mdl;
    mdl.da = ra;
    mdl.db = rb;
    const int auto_terms = static_cast<int>(std::min<std::int64_t>((ra * rb) * (ra * rb), st.max_terms));
    mdl.terms = st.n_terms > 0 ? st.n_terms : auto_terms;

    std::mt19937_64 rng(st.seed);
    Attempt best;
    for (int r = 0; r < st.restarts; ++r) {
        const RVec seed = r == 0 ? cq_seed(mdl, red, rng) : random_seed(mdl, rng);
        Attempt at = optimize(mdl, seed, red, st);
        result.iterations += at.iterations;
        result.restarts_used = r + 1;
        if (at.distance < best.distance) {
            best = std::move(at);
            result.best_restart = r;
        }
        if (best.distance <= st.tol) break;
    }

    double total = 0.0;
    for (int k = 0; k < mdl.terms; ++k) total += mdl.a(best.p, k).squaredNorm() * mdl.b(best.p, k).squaredNorm();
    for (int k = 0; k < mdl.terms; ++k) {
        const Vec a = mdl.a(best.p, k), b = mdl.b(best.p, k);
        const double w = a.squaredNorm() * b.squaredNorm() / total;
        if (!(w > 0.0)) continue;
        dec.weights.push_back(w);
        dec.a_states.push_back(ua * a / a.norm());
        const Vec bl = ub * b / b.norm();
        dec.b_states.push_back(bl * bl.adjoint());
    }
    finalize(dec);
    result.distance = schatten1(rho - dec.reconstruct());
    result.converged = best.converged;
    result.certified = result.distance <= st.tol;
    return result;
}

} // namespace nzam
