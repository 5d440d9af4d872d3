#include "nzam/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "nzam/correlations.hpp"

namespace nzam {

namespace mp = boost::multiprecision;

double y_tail(double x, int L, double J) {
    if (!(x >= 0.0)) throw std::invalid_argument("y_tail: x must be non-negative");
    if (L < 0) throw std::invalid_argument("y_tail: L must be non-negative");
    const double z = 8.0 * x * J;
    if (z == 0.0) return L == 0 ? 1.0 : 0.0;
    double term = std::exp(L * std::log(z) - std::lgamma(L + 1.0));
    double sum = 0.0;
    for (int k = L; k < L + 100000; ++k) {
        sum += term;
        if (k > z && term < 1e-18 * sum) break;
        term *= z / (k + 1);
    }
    return sum;
}

double decay_rate(double x, int L, double J) {
    if (L <= 0) throw std::invalid_argument("decay_rate: L must be positive");
    return -std::log(8.0 * std::exp(1.0) * J * x / L);
}

double decay_form(double x, int L, double J) {
    if (x == 0.0) return 0.0;
    return std::exp(-decay_rate(x, L, J) * L + 8.0 * J * x);
}

StirlingCheck stirling_check(int L, int k) {
    if (L < 1 || k < 0) throw std::invalid_argument("stirling_check: need L >= 1 and k >= 0");
    StirlingCheck s;
    s.log_lhs = -std::lgamma(L + k + 1.0);
    s.log_rhs = L - std::lgamma(k + 1.0) - k * std::log(static_cast<double>(L));
    if (L + k <= 40) {
        // k! L^k <= e^L (L + k)!
        mp::cpp_int fk = 1, fl = 1, pk = 1, pl = 1;
        for (int i = 2; i <= k; ++i) fk *= i;
        for (int i = 2; i <= L + k; ++i) fl *= i;
        for (int i = 0; i < k; ++i) pk *= L;
        for (int i = 0; i < L; ++i) pl *= L;
        using Big = mp::cpp_bin_float_100;
        const Big rhs = mp::exp(Big(L)) * Big(fl);
        s.holds = Big(fk * pk) <= rhs;
        s.holds_power_l = Big(fk * pl) <= rhs;
        s.exact = true;
    } else {
        s.holds = s.log_lhs <= s.log_rhs;
        s.holds_power_l = -std::lgamma(L + k + 1.0) <= L - std::lgamma(k + 1.0) - L * std::log(static_cast<double>(L));
    }
    return s;
}

void validate(const BoundParams& p) {
    if (!(p.J > 0.0)) throw std::invalid_argument("bounds: J must be positive");
    if (!(p.K >= 1.0)) throw std::invalid_argument("bounds: K must be at least 1");
    if (!(p.L_env >= 1.0)) throw std::invalid_argument("bounds: L_env must be at least 1");
    if (!(p.x >= 0.0)) throw std::invalid_argument("bounds: x must be non-negative");
    if (!(p.beta >= 0.0)) throw std::invalid_argument("bounds: beta must be non-negative");
    if (!(p.alpha > 0.0)) throw std::invalid_argument("bounds: alpha must be positive");
    if (!(p.C >= 0.0)) throw std::invalid_argument("bounds: C must be non-negative");
    if (!(p.dim_A >= 2.0)) throw std::invalid_argument("bounds: |A| must be at least 2");
    if (!(p.l0 >= 1.0)) throw std::invalid_argument("bounds: |l0| must be at least 1");
}

nlohmann::json BoundReport::to_json() const {
    nlohmann::json j;
    j["mode"] = mode;
    j["params"] = {{"J", params.J},       {"K", params.K},     {"L_env", params.L_env}, {"alpha", params.alpha},
                   {"beta", params.beta}, {"C", params.C},     {"x", params.x},         {"dim_A", params.dim_A},
                   {"l0", params.l0}};
    nlohmann::json per = nlohmann::json::array();
    for (const auto& t : terms) per.push_back({{"d", t.d}, {"value", t.value}});
    j["per_distance"] = per;
    j["total"] = std::isfinite(total) ? nlohmann::json(total) : nlohmann::json(nullptr);
    if (mode != "measured") {
        j["D"] = D;
        j["near_sum"] = near_sum;
        j["far_sum"] = std::isfinite(far_sum) ? nlohmann::json(far_sum) : nlohmann::json(nullptr);
        j["conditional_on_C"] = conditional_on_C;
    }
    j["verdict"] = vacuous ? "vacuous" : "finite";
    return j;
}

BoundReport inhom_bound_1d_measured(double J, double x, const std::vector<double>& delta_norms) {
    if (delta_norms.empty()) throw std::invalid_argument("inhom_bound_1d: empty delta_norms");
    if (!(J > 0.0)) throw std::invalid_argument("inhom_bound_1d: J must be positive");
    BoundReport r;
    r.mode = "measured";
    r.params.J = J;
    r.params.x = x;
    r.params.L_env = static_cast<double>(delta_norms.size());
    for (std::size_t i = 0; i < delta_norms.size(); ++i) {
        const int d = static_cast<int>(i) + 1;
        const double v = J * y_tail(x, d - 1, J) * delta_norms[i];
        r.terms.push_back({d, v});
        r.total += v;
    }
    return r;
}

namespace {

double extendibility_constant(double dim_a) { return std::sqrt(918.0 * std::log(2.0) * dim_a * std::log2(dim_a)); }

constexpr int kMaxDistance = 1000000;

} // namespace

int crossover_distance_1d(const BoundParams& p) {
    validate(p);
    for (int d = 1; d <= kMaxDistance; ++d) {
        // |B_d| ~ exp(beta d), k ~ L / d
        const auto b = dfse_bound(p.dim_A, std::exp(p.beta * d), p.L_env / d);
        if (b.raw >= kTrivialDistanceCap) return d;
    }
    return kMaxDistance;
}

int crossover_distance_highd(const BoundParams& p) {
    validate(p);
    const double c = extendibility_constant(p.dim_A);
    for (int d = 1; d <= kMaxDistance; ++d) {
        const double b = c * std::sqrt(d * std::exp(p.beta * d) / std::pow(p.L_env, p.alpha));
        if (b >= kTrivialDistanceCap) return d;
    }
    return kMaxDistance;
}

BoundReport inhom_bound_1d_analytic(const BoundParams& p) {
    validate(p);
    BoundReport r;
    r.mode = "analytic_1d";
    r.params = p;
    r.conditional_on_C = true;
    r.D = crossover_distance_1d(p);
    const double c1 = p.C * p.J / 2.0;
    const double c2 = p.C * p.J * extendibility_constant(p.dim_A);
    const int last = static_cast<int>(std::floor(p.L_env));
    const double ratio_base = 8.0 * std::exp(1.0) * p.J * p.x; // (8 e J x / d)^d = exp(-mu d)
    for (int d = 1; d <= last; ++d) {
        double v = 0.0;
        if (p.x > 0.0) {
            const double log_decay = d * std::log(ratio_base / d) + 8.0 * p.J * p.x;
            if (ratio_base / d >= 1.0) r.vacuous = true;
            if (d <= r.D)
                v = c2 * std::sqrt(static_cast<double>(d)) * std::exp(log_decay + 0.5 * p.beta * d) / std::sqrt(p.L_env);
            else
                v = c1 * std::exp(log_decay);
        }
        (d <= r.D ? r.near_sum : r.far_sum) += v;
        r.terms.push_back({d, v});
    }
    r.total = r.near_sum + r.far_sum;
    return r;
}

double highd_near_sum(const BoundParams& p, int D) {
    validate(p);
    if (p.x == 0.0) return 0.0;
    const double c2 = 2.0 * p.C * p.l0 * extendibility_constant(p.dim_A);
    const double log_r = std::log(2.0 * p.K * std::exp(1.0) * p.J * p.x) + 2.0 * p.J * p.x;
    double s = 0.0;
    for (int d = 1; d <= D; ++d)
        s += c2 * std::sqrt(static_cast<double>(d)) * std::exp(d * (log_r + 0.5 * p.beta)) / std::pow(p.L_env, 0.5 * p.alpha);
    return s;
}

BoundReport inhom_bound_highd(const BoundParams& p) {
    validate(p);
    BoundReport r;
    r.mode = "higher_d";
    r.params = p;
    r.conditional_on_C = true;
    r.D = crossover_distance_highd(p);
    if (p.x == 0.0) return r;
    // exp(-mu' d + v' x) with v' = 2 d J collapses to r^d
    const double ratio = 2.0 * p.K * std::exp(1.0) * p.J * p.x * std::exp(2.0 * p.J * p.x);
    const double c1 = p.C * p.l0;
    r.near_sum = highd_near_sum(p, r.D);
    const double c2 = 2.0 * p.C * p.l0 * extendibility_constant(p.dim_A);
    for (int d = 1; d <= std::min(r.D, 64); ++d)
        r.terms.push_back({d, c2 * std::sqrt(static_cast<double>(d)) * std::pow(ratio, d) * std::exp(0.5 * p.beta * d) /
                                  std::pow(p.L_env, 0.5 * p.alpha)});
    if (ratio >= 1.0) {
        r.vacuous = true;
        r.far_sum = std::numeric_limits<double>::infinity();
    } else {
        r.far_sum = c1 * std::exp((r.D + 1) * std::log(ratio)) / (1.0 - ratio);
    }
    r.total = r.near_sum + r.far_sum;
    return r;
}

} // namespace nzam
