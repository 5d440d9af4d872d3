// nz_dynamics.hpp: exact evolution and the assignment-map N-Z decomposition
//
// With P = A o M_0 and K(t) = (I - P) L_1(t) + L_0bar(t), the reduced derivative splits as
//   d/dt M_0 rho = drive + inhom + memory
//   drive  = M_0 L_1 P rho(t)
//   inhom  = M_0 L_1 V(t),  dV/dt = K V,                  V(t0) = Delta = (I - P) rho(t0)
//   memory = M_0 L_1 W(t),  dW/dt = K (W + A rho_S(t)),   W(t0) = 0
// W(t) equals the memory integral of G(t, s) K(s) A rho_S(s) over s.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nzam/assignment.hpp"
#include "nzam/lattice.hpp"

namespace nzam {

// A requested computation whose cost guard refuses it.
struct InfeasibleRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeGrid {
    double t_max = 1.0;
    double h = 1e-3;
    int steps() const;
    double step() const; // t_max / steps(), close to h
};

struct EvolveOptions {
    int positivity_stride = 100; // steps between eigenvalue checks; 0 checks only the end
    int joint_stride = 0;        // keep every n-th joint state; 0 keeps none
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Mat> reduced; // M_0 rho(t)
    std::vector<Mat> pair;    // M_1 rho(t)
    std::vector<Mat> joint;   // every joint_stride-th state
    int joint_stride = 0;
    Mat initial;
    double min_eigenvalue = 0.0;
    double max_trace_error = 0.0;
    double max_hermiticity_defect = 0.0;
};

Trajectory exact_evolve(const ChainModel& m, const Mat& rho0, const TimeGrid& grid, const EvolveOptions& opts = {});

// Everything the dynamics needs from an assignment map, restricted to the chain.
class AnchoredMap {
public:
    AnchoredMap(const ChainModel& m, const AssignmentMap& a);

    const AssignmentMap& map() const { return *a_; }
    Mat apply(const Mat& rho_s) const { return a_->apply(rho_s); }
    // A o M_0 X
    Mat apply_projected(const Mat& x) const;
    // M_1 A rho_s from cached reduced responses
    Mat pair_of(const Mat& rho_s) const;
    // K(t) X for Hermitian X
    Mat generator(double t, const Mat& x) const;

private:
    const ChainModel* m_;
    const AssignmentMap* a_;
    std::vector<Mat> pair_resp_;
    Mat basis_;
};

// Applies G(t, s) by RK4 steps of K with step close to h.
Mat propagate_G(const ChainModel& m, const AnchoredMap& a, const Mat& x, double s, double t, double h);

enum class MemoryMode { ode, quadrature, none };
MemoryMode parse_memory_mode(const std::string& name);
std::string to_string(MemoryMode mode);

// Joint dimension above which the quadrature kernel is refused.
inline constexpr std::int64_t kQuadratureMaxDim = 64;

struct NzOptions {
    MemoryMode memory = MemoryMode::ode;
    bool delta_norms = true;
};

struct NzDecomposition {
    std::vector<double> times;
    std::vector<Mat> derivative; // M_0 L_1(t) rho(t)
    std::vector<Mat> drive;
    std::vector<Mat> inhom;
    std::vector<Mat> memory; // empty when the memory mode is none
    std::vector<double> closure_residual;
    std::vector<double> delta_norms; // ||M_d Delta||_1, d = 1..N
    double delta_norm = 0.0;         // ||Delta||_1
    double marginal_mismatch = 0.0;  // ||M_0 A M_0 rho(t0) - M_0 rho(t0)||_1
    double max_trace = 0.0;          // largest |Tr| over all terms
    MemoryMode mode = MemoryMode::ode;

    double max_norm(const std::vector<Mat>& series) const;
};

Mat initial_irrelevant(const AnchoredMap& a, const Mat& rho0);
std::vector<double> delta_profile(const ChainModel& m, const Mat& delta);

NzDecomposition nz_decompose(const ChainModel& m, const Trajectory& traj, const AnchoredMap& a,
                             const NzOptions& opts = {});

// inhom(t) on the grid for a given Delta; the only cost is one propagated operator.
std::vector<Mat> inhom_series(const ChainModel& m, const AnchoredMap& a, const Mat& delta, const TimeGrid& grid);

// ||drive(t)||_1, the gap between the two-term form and exact closure.
std::vector<double> generator_form_residual(const NzDecomposition& d);

struct TruncationFlags {
    bool drive = true;
    bool memory = true;
    bool inhom = false;
};

struct ReducedTrajectory {
    std::vector<double> times;
    std::vector<Mat> states;
    double max_error = -1.0; // against the exact reduced trajectory when supplied
};

ReducedTrajectory truncated_solve(const ChainModel& m, const AnchoredMap& a, const Mat& rho_s0, const TruncationFlags& flags,
                                  const TimeGrid& grid, const Mat* delta = nullptr, const Trajectory* exact = nullptr);

} // namespace nzam
