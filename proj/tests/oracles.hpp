// Independent reference computations shared by the unit tests and the acceptance run.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nzam/linalg.hpp"
#include "nzam/states.hpp"

namespace oracle {

// Plain partial sum of z^k / k! for k >= L in 50-digit arithmetic:
// e^z - sum_{k<L} z^k/k! loses everything to cancellation in double.
inline double y_tail(double x, int L, double J) {
    using Big = boost::multiprecision::cpp_bin_float_50;
    const Big z = Big(8) * Big(x) * Big(J);
    if (z == 0) return L == 0 ? 1.0 : 0.0;
    Big term = 1;
    for (int k = 1; k <= L; ++k) term *= z / k;
    Big sum = 0;
    for (int k = L; k < L + 2000; ++k) {
        sum += term;
        if (k > z && term < sum * Big(1e-40)) break;
        term *= z / (k + 1);
    }
    return static_cast<double>(sum);
}

// Forward DP over (last bond, largest bond) for the half-line sequence rule.
inline std::uint64_t sequence_count(int k) {
    std::map<std::pair<int, int>, std::uint64_t> level{{{0, 0}, 1}};
    for (int step = 0; step < k; ++step) {
        std::map<std::pair<int, int>, std::uint64_t> next;
        for (const auto& [key, n] : level) {
            const auto [l, m] = key;
            std::set<int> opts{l - 1, l, l + 1, m, m + 1};
            for (int b : opts)
                if (b >= 0) next[{b, std::max(m, b)}] += n;
        }
        level = std::move(next);
    }
    std::uint64_t total = 0;
    for (const auto& kv : level) total += kv.second;
    return total;
}

// Bonds as (x, y, dir); dir 0 points along +x, dir 1 along +y.
using Bond = std::tuple<int, int, int>;

inline std::array<std::pair<int, int>, 2> ends(const Bond& b) {
    const auto [x, y, d] = b;
    return {{{x, y}, d == 0 ? std::pair{x + 1, y} : std::pair{x, y + 1}}};
}

inline bool touches(const Bond& a, const Bond& b) {
    if (a == b) return false;
    for (const auto& p : ends(a))
        for (const auto& q : ends(b))
            if (p == q) return true;
    return false;
}

// Grows every connected bond set containing the anchor one bond at a time;
// sets are stored sorted so duplicates collapse.
inline std::vector<std::uint64_t> animal_counts(bool square, int i_max) {
    const Bond anchor{0, 0, 0};
    std::vector<std::uint64_t> out{1};
    std::set<std::vector<Bond>> level{{anchor}};
    for (int i = 1; i <= i_max; ++i) {
        out.push_back(level.size());
        if (i == i_max) break;
        std::set<std::vector<Bond>> next;
        for (const auto& s : level) {
            std::set<Bond> cand;
            for (const auto& b : s) {
                const auto [x, y, d] = b;
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dy = square ? -1 : 0; dy <= (square ? 1 : 0); ++dy)
                        for (int dd = 0; dd <= (square ? 1 : 0); ++dd) {
                            const Bond c{x + dx, y + dy, dd};
                            if (!square && std::get<0>(c) < 0) continue;
                            if (touches(b, c)) cand.insert(c);
                        }
            }
            for (const auto& c : cand) {
                if (std::find(s.begin(), s.end(), c) != s.end()) continue;
                auto t = s;
                t.push_back(c);
                std::sort(t.begin(), t.end());
                next.insert(t);
            }
        }
        level = std::move(next);
    }
    return out;
}

// Closest separable state to |Phi+>. The U (x) U* twirl fixes Phi+, maps
// separable states to separable isotropic states and does not increase the
// Schatten-1 distance, so a scan over the isotropic family with a PPT test
// (exact for 2x2) gives the minimum.
inline double bell_bss_distance(int grid = 20001) {
    const nzam::Mat phi = nzam::bell_state();
    const nzam::Mat rest = (nzam::Mat::Identity(4, 4) - phi) / 3.0;
    const nzam::SpaceLayout two({2, 2});
    double best = 1e300;
    for (int k = 0; k < grid; ++k) {
        const double f = static_cast<double>(k) / (grid - 1);
        const nzam::Mat s = f * phi + (1.0 - f) * rest;
        if (nzam::min_eigenvalue(nzam::partial_transpose(s, two, {1})) < -1e-12) continue;
        best = std::min(best, nzam::schatten1(phi - s));
    }
    return best;
}

} // namespace oracle
