#include "nzam/nz_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nzam/kernels.hpp"
#include "nzam/linalg.hpp"

namespace nzam {

int TimeGrid::steps() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("TimeGrid: h must be positive");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("TimeGrid: t_max must be non-negative");
    return static_cast<int>(std::ceil(t_max / h - 1e-9));
}

double TimeGrid::step() const {
    const int n = steps();
    return n == 0 ? h : t_max / n;
}

namespace {

double cheap_hermiticity_defect(const Mat& x) { return (x - x.adjoint()).cwiseAbs().maxCoeff(); }

template <class F>
Mat rk4(const F& f, double t, double h, const Mat& y) {
    const Mat k1 = f(t, y);
    const Mat k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
    const Mat k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
    const Mat k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double max_abs_trace(const std::vector<Mat>& series) {
    double worst = 0.0;
    for (const auto& x : series) worst = std::max(worst, std::abs(x.trace()));
    return worst;
}

} // namespace

Trajectory exact_evolve(const ChainModel& m, const Mat& rho0, const TimeGrid& grid, const EvolveOptions& opts) {
    const auto d = m.layout.total_dim();
    if (rho0.rows() != d || rho0.cols() != d) throw std::invalid_argument("exact_evolve: initial state has wrong size");
    if (d > 4096) throw std::invalid_argument("exact_evolve: joint dimension above 2^12");
    const int n = grid.steps();
    const double h = grid.step();
    const int nb = m.num_bonds();
    auto rhs = [&](double t, const Mat& x) { return liouvillian(m, t, 0, nb, x, true); };

    Trajectory tr;
    tr.initial = rho0;
    tr.joint_stride = opts.joint_stride;
    tr.min_eigenvalue = min_eigenvalue(rho0);
    Mat rho = 0.5 * (rho0 + rho0.adjoint());
    auto record = [&](int k) {
        tr.times.push_back(k * h);
        tr.reduced.push_back(reduce_to(m, 0, rho));
        tr.pair.push_back(reduce_to(m, std::min(1, m.n_env()), rho));
        if (opts.joint_stride > 0 && k % opts.joint_stride == 0) tr.joint.push_back(rho);
        tr.max_trace_error = std::max(tr.max_trace_error, std::abs(rho.trace() - cplx(1.0)));
    };
    auto check = [&](int k) {
        tr.max_hermiticity_defect = std::max(tr.max_hermiticity_defect, cheap_hermiticity_defect(rho));
        const double lo = min_eigenvalue(rho);
        tr.min_eigenvalue = std::min(tr.min_eigenvalue, lo);
        if (lo < -1e-6) {
            std::ostringstream msg;
            msg << "exact_evolve: positivity violated at t = " << k * h << " (min eigenvalue " << lo << ")";
            throw std::runtime_error(msg.str());
        }
    };
    record(0);
    for (int k = 0; k < n; ++k) {
        rho = rk4(rhs, k * h, h, rho);
        record(k + 1);
        if (opts.positivity_stride > 0 && (k + 1) % opts.positivity_stride == 0) check(k + 1);
    }
    check(n);
    return tr;
}

AnchoredMap::AnchoredMap(const ChainModel& m, const AssignmentMap& a) : m_(&m), a_(&a) {
    if (a.dim_s() != m.layout.site_dim(0) || a.dim_s() * a.dim_e() != m.layout.total_dim())
        throw std::invalid_argument("AnchoredMap: assignment map does not match the chain");
    pair_resp_ = a.reduced_responses([&m](const Mat& r) { return reduce_to(m, std::min(1, m.n_env()), r); });
    basis_ = a.basis();
}

Mat AnchoredMap::apply_projected(const Mat& x) const { return a_->apply(reduce_to(*m_, 0, x)); }

Mat AnchoredMap::pair_of(const Mat& rho_s) const {
    Mat out = Mat::Zero(pair_resp_.front().rows(), pair_resp_.front().cols());
    for (std::size_t i = 0; i < pair_resp_.size(); ++i) {
        const auto c = basis_.col(static_cast<Eigen::Index>(i));
        out += c.dot(rho_s * c) * pair_resp_[i];
    }
    return out;
}

Mat AnchoredMap::generator(double t, const Mat& x) const {
    Mat out = liouvillian(*m_, t, 0, m_->num_bonds(), x, true);
    const Mat flow = boundary_flow(*m_, t, reduce_to(*m_, 1, x));
    const auto& resp = a_->responses();
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const auto c = basis_.col(static_cast<Eigen::Index>(i));
        const cplx w = c.dot(flow * c);
        if (w != cplx(0.0)) out -= w * resp[i];
    }
    return out;
}

Mat propagate_G(const ChainModel& m, const AnchoredMap& a, const Mat& x, double s, double t, double h) {
    if (t < s) throw std::invalid_argument("propagate_G: requires s <= t");
    if (x.rows() != m.layout.total_dim()) throw std::invalid_argument("propagate_G: operand has wrong size");
    const TimeGrid g{t - s, h};
    const int n = g.steps();
    const double step = g.step();
    auto f = [&](double u, const Mat& y) { return a.generator(u, y); };
    Mat y = x;
    for (int k = 0; k < n; ++k) y = rk4(f, s + k * step, step, y);
    return y;
}

MemoryMode parse_memory_mode(const std::string& name) {
    if (name == "ode") return MemoryMode::ode;
    if (name == "quadrature") return MemoryMode::quadrature;
    if (name == "none") return MemoryMode::none;
    throw std::invalid_argument("unknown memory mode \"" + name + "\"");
}

std::string to_string(MemoryMode mode) {
    switch (mode) {
    case MemoryMode::ode: return "ode";
    case MemoryMode::quadrature: return "quadrature";
    case MemoryMode::none: return "none";
    }
    return "?";
}

double NzDecomposition::max_norm(const std::vector<Mat>& series) const {
    double worst = 0.0;
    for (const auto& x : series) worst = std::max(worst, schatten1(x));
    return worst;
}

Mat initial_irrelevant(const AnchoredMap& a, const Mat& rho0) { return rho0 - a.apply_projected(rho0); }

std::vector<double> delta_profile(const ChainModel& m, const Mat& delta) {
    std::vector<double> out;
    for (int d = 1; d <= m.n_env(); ++d) out.push_back(schatten1(reduce_to(m, d, delta)));
    return out;
}

std::vector<Mat> inhom_series(const ChainModel& m, const AnchoredMap& a, const Mat& delta, const TimeGrid& grid) {
    const int n = grid.steps();
    const double h = grid.step();
    auto f = [&](double u, const Mat& y) { return a.generator(u, y); };
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    Mat v = 0.5 * (delta + delta.adjoint());
    out.push_back(boundary_flow(m, 0.0, reduce_to(m, 1, v)));
    for (int k = 0; k < n; ++k) {
        v = rk4(f, k * h, h, v);
        out.push_back(boundary_flow(m, (k + 1) * h, reduce_to(m, 1, v)));
    }
    return out;
}

namespace {

// Weights of a composite rule on n equal intervals: Simpson, with a closing
// 3/8 panel for odd n and the trapezoid for n = 1.
std::vector<double> quadrature_weights(int n, double h) {
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    if (n == 0) return w;
    if (n == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    const int simpson_end = n % 2 == 0 ? n : n - 3;
    for (int j = 0; j + 2 <= simpson_end; j += 2) {
        w[static_cast<std::size_t>(j)] += h / 3.0;
        w[static_cast<std::size_t>(j) + 1] += 4.0 * h / 3.0;
        w[static_cast<std::size_t>(j) + 2] += h / 3.0;
    }
    if (simpson_end != n) {
        const auto j = static_cast<std::size_t>(simpson_end);
        w[j] += 3.0 * h / 8.0;
        w[j + 1] += 9.0 * h / 8.0;
        w[j + 2] += 9.0 * h / 8.0;
        w[j + 3] += 3.0 * h / 8.0;
    }
    return w;
}

} // namespace

NzDecomposition nz_decompose(const ChainModel& m, const Trajectory& traj, const AnchoredMap& a, const NzOptions& opts) {
    if (traj.times.size() < 1) throw std::invalid_argument("nz_decompose: empty trajectory");
    if (opts.memory == MemoryMode::quadrature && m.layout.total_dim() > kQuadratureMaxDim)
        throw InfeasibleRequest("nz_decompose: full memory-kernel quadrature refused for joint dimension " +
                                std::to_string(m.layout.total_dim()) + " > " + std::to_string(kQuadratureMaxDim) +
                                "; use memory mode \"ode\"");
    const int n = static_cast<int>(traj.times.size()) - 1;
    const double h = n > 0 ? traj.times[1] - traj.times[0] : 0.0;
    NzDecomposition out;
    out.mode = opts.memory;
    out.times = traj.times;

    const Mat delta = initial_irrelevant(a, traj.initial);
    out.delta_norm = schatten1(delta);
    out.marginal_mismatch = schatten1(reduce_to(m, 0, delta));
    if (opts.delta_norms) out.delta_norms = delta_profile(m, delta);

    for (int k = 0; k <= n; ++k) {
        const double t = traj.times[static_cast<std::size_t>(k)];
        out.derivative.push_back(boundary_flow(m, t, traj.pair[static_cast<std::size_t>(k)]));
        out.drive.push_back(boundary_flow(m, t, a.pair_of(traj.reduced[static_cast<std::size_t>(k)])));
    }
    out.inhom = inhom_series(m, a, delta, TimeGrid{traj.times.back(), h > 0.0 ? h : 1.0});

    // reduced state between grid points, cubic Hermite with the exact derivative
    auto midpoint = [&](int k) {
        const auto ku = static_cast<std::size_t>(k);
        return Mat(0.5 * (traj.reduced[ku] + traj.reduced[ku + 1]) +
                   (h / 8.0) * (out.derivative[ku] - out.derivative[ku + 1]));
    };

    if (opts.memory == MemoryMode::ode) {
        const auto d = m.layout.total_dim();
        Mat w = Mat::Zero(d, d);
        out.memory.push_back(Mat::Zero(2, 2));
        for (int k = 0; k < n; ++k) {
            const double t = k * h;
            const Mat f0 = a.apply(traj.reduced[static_cast<std::size_t>(k)]);
            const Mat fm = a.apply(midpoint(k));
            const Mat f1 = a.apply(traj.reduced[static_cast<std::size_t>(k) + 1]);
            const Mat k1 = a.generator(t, w + f0);
            const Mat k2 = a.generator(t + 0.5 * h, w + (0.5 * h) * k1 + fm);
            const Mat k3 = a.generator(t + 0.5 * h, w + (0.5 * h) * k2 + fm);
            const Mat k4 = a.generator(t + h, w + h * k3 + f1);
            w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            out.memory.push_back(boundary_flow(m, t + h, reduce_to(m, 1, w)));
        }
    } else if (opts.memory == MemoryMode::quadrature) {
        auto f = [&](double u, const Mat& y) { return a.generator(u, y); };
        std::vector<Mat> items;
        for (int k = 0; k <= n; ++k) {
            const double t = traj.times[static_cast<std::size_t>(k)];
            items.push_back(a.generator(t, a.apply(traj.reduced[static_cast<std::size_t>(k)])));
            const auto wts = quadrature_weights(k, h);
            Mat acc = Mat::Zero(2, 2);
            for (int j = 0; j <= k; ++j)
                acc += wts[static_cast<std::size_t>(j)] * boundary_flow(m, t, reduce_to(m, 1, items[static_cast<std::size_t>(j)]));
            out.memory.push_back(acc);
            if (k < n)
                for (auto& x : items) x = rk4(f, t, h, x);
        }
    }

    for (int k = 0; k <= n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (out.memory.empty()) {
            out.closure_residual.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            out.closure_residual.push_back(
                schatten1(out.derivative[ku] - out.drive[ku] - out.inhom[ku] - out.memory[ku]));
        }
    }
    out.max_trace = std::max({max_abs_trace(out.drive), max_abs_trace(out.inhom), max_abs_trace(out.memory)});
    return out;
}

std::vector<double> generator_form_residual(const NzDecomposition& d) {
    std::vector<double> out;
    out.reserve(d.drive.size());
    for (const auto& x : d.drive) out.push_back(schatten1(x));
    return out;
}

ReducedTrajectory truncated_solve(const ChainModel& m, const AnchoredMap& a, const Mat& rho_s0, const TruncationFlags& flags,
                                  const TimeGrid& grid, const Mat* delta, const Trajectory* exact) {
    if (flags.inhom && !delta) throw std::invalid_argument("truncated_solve: the inhomogeneous term needs Delta");
    const int n = grid.steps();
    const double h = grid.step();
    const auto d = m.layout.total_dim();

    struct State {
        Mat s, w, v;
    };
    auto axpy = [&](const State& y, double c, const State& k) {
        State r{y.s + c * k.s, Mat(), Mat()};
        if (flags.memory) r.w = y.w + c * k.w;
        if (flags.inhom) r.v = y.v + c * k.v;
        return r;
    };
    auto rhs = [&](double t, const State& y) {
        State r{Mat::Zero(2, 2), Mat(), Mat()};
        if (flags.drive) r.s += boundary_flow(m, t, a.pair_of(y.s));
        if (flags.memory) {
            r.s += boundary_flow(m, t, reduce_to(m, 1, y.w));
            r.w = a.generator(t, y.w + a.apply(y.s));
        }
        if (flags.inhom) {
            r.s += boundary_flow(m, t, reduce_to(m, 1, y.v));
            r.v = a.generator(t, y.v);
        }
        return r;
    };

    State y{rho_s0, flags.memory ? Mat(Mat::Zero(d, d)) : Mat(), flags.inhom ? Mat(*delta) : Mat()};
    ReducedTrajectory out;
    out.times.push_back(0.0);
    out.states.push_back(y.s);
    for (int k = 0; k < n; ++k) {
        const double t = k * h;
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
        const State k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
        const State k4 = rhs(t + h, axpy(y, h, k3));
        y.s += (h / 6.0) * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
        if (flags.memory) y.w += (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
        if (flags.inhom) y.v += (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        out.times.push_back(t + h);
        out.states.push_back(y.s);
    }
    if (exact) {
        if (exact->reduced.size() != out.states.size())
            throw std::invalid_argument("truncated_solve: exact trajectory is on a different grid");
        out.max_error = 0.0;
        for (std::size_t k = 0; k < out.states.size(); ++k)
            out.max_error = std::max(out.max_error, schatten1(out.states[k] - exact->reduced[k]));
    }
    return out;
}

} // namespace nzam
