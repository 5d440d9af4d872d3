// bounds.hpp: light-cone tail function and the assembled inhomogeneous-term bounds

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace nzam {

// y(x, L) = sum_{k >= L} z^k / k!, z = 8 x J
double y_tail(double x, int L, double J);
// mu(x, L) = -ln(8 e J x / L)
double decay_rate(double x, int L, double J);
// exp(-mu L + 8 J x), the exponential form of the tail bound
double decay_form(double x, int L, double J);

struct StirlingCheck {
    bool holds = false;
    bool exact = false; // big-integer comparison (L + k <= 40)
    double log_lhs = 0.0; // ln(1 / (L + k)!)
    double log_rhs = 0.0; // ln(e^L / (k! L^k))
    // 1/(L + k)! <= e^L / (k! L^L), the form behind the exponential decay bound
    bool holds_power_l = false;
};

StirlingCheck stirling_check(int L, int k);

struct BoundParams {
    double J = 1.0;
    double K = 2.0;      // lattice valence
    double L_env = 1.0;  // environment length scale (sites)
    double alpha = 1.0;  // spatial dimension exponent
    double beta = 0.6931471805599453; // ln 2, per-site entropy rate of a qubit
    double C = 1.0;      // smoothness constant, not derived
    double x = 0.0;      // t - t0
    double dim_A = 2.0;
    double l0 = 1.0;     // number of possible seed bonds |l0|
};

void validate(const BoundParams& p);

struct BoundTerm {
    int d = 0;
    double value = 0.0;
};

struct BoundReport {
    std::string mode;
    BoundParams params;
    double total = 0.0;
    std::vector<BoundTerm> terms;
    int D = 0;                 // crossover distance (analytic modes)
    double near_sum = 0.0;     // d <= D
    double far_sum = 0.0;      // d > D
    bool vacuous = false;      // divergent tail or no decay
    bool conditional_on_C = false;

    nlohmann::json to_json() const;
};

// sum_{d=1}^{N} J y(x, d - 1) ||M_d Delta||_1, delta_norms[d - 1] = ||M_d Delta||_1
BoundReport inhom_bound_1d_measured(double J, double x, const std::vector<double>& delta_norms);

// Smallest d with the extendibility distance bound at or above the trivial cap.
int crossover_distance_1d(const BoundParams& p);
int crossover_distance_highd(const BoundParams& p);

BoundReport inhom_bound_1d_analytic(const BoundParams& p);
BoundReport inhom_bound_highd(const BoundParams& p);
// sum_{d <= D} part of the higher-dimensional bound for a given D
double highd_near_sum(const BoundParams& p, int D);

} // namespace nzam
