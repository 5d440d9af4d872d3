#include "nzam/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace nzam {

namespace {

// Bond b joins sites b and b + 1; the graph so far spans bonds 0..maxb.
std::uint64_t sequences_from(int last, int maxb, int remaining) {
    if (remaining == 0) return 1;
    int opts[5] = {last - 1, last, last + 1, maxb, maxb + 1};
    std::sort(opts, opts + 5);
    std::uint64_t n = 0;
    for (int i = 0; i < 5; ++i) {
        if (opts[i] < 0 || (i > 0 && opts[i] == opts[i - 1])) continue;
        n += sequences_from(opts[i], std::max(maxb, opts[i]), remaining - 1);
    }
    return n;
}

struct Lattice {
    double K;
    std::int64_t anchor;
    std::vector<std::int64_t> (*neighbours)(std::int64_t);
};

std::vector<std::int64_t> line_neighbours(std::int64_t b) {
    if (b == 0) return {1};
    return {b - 1, b + 1};
}

// square bonds: (x, y, dir), dir 0 joins (x,y)-(x+1,y), dir 1 joins (x,y)-(x,y+1)
constexpr std::int64_t kOff = 64;
std::int64_t sq_key(std::int64_t x, std::int64_t y, std::int64_t dir) { return ((x + kOff) * 256 + (y + kOff)) * 2 + dir; }

void sq_at_site(std::int64_t x, std::int64_t y, std::vector<std::int64_t>& out) {
    out.push_back(sq_key(x, y, 0));
    out.push_back(sq_key(x - 1, y, 0));
    out.push_back(sq_key(x, y, 1));
    out.push_back(sq_key(x, y - 1, 1));
}

std::vector<std::int64_t> square_neighbours(std::int64_t key) {
    const std::int64_t dir = key % 2, y = (key / 2) % 256 - kOff, x = key / 512 - kOff;
    std::vector<std::int64_t> out;
    sq_at_site(x, y, out);
    if (dir == 0)
        sq_at_site(x + 1, y, out);
    else
        sq_at_site(x, y + 1, out);
    out.erase(std::remove(out.begin(), out.end(), key), out.end());
    return out;
}

Lattice lattice_of(const std::string& name) {
    if (name == "1d") return {2.0, 0, &line_neighbours};
    if (name == "square") return {4.0, sq_key(0, 0, 0), &square_neighbours};
    throw std::invalid_argument("count_animals: unknown lattice '" + name + "'");
}

// Redelmeier: every connected set containing the root is generated once.
void redelmeier(const Lattice& lat, std::vector<std::int64_t> untried, int size, int max_size,
                std::unordered_set<std::int64_t>& seen, std::vector<std::uint64_t>& counts) {
    while (!untried.empty()) {
        const std::int64_t c = untried.back();
        untried.pop_back();
        ++counts[static_cast<std::size_t>(size + 1)];
        if (size + 1 < max_size) {
            std::vector<std::int64_t> next = untried, added;
            for (std::int64_t nb : lat.neighbours(c))
                if (seen.insert(nb).second) {
                    next.push_back(nb);
                    added.push_back(nb);
                }
            redelmeier(lat, std::move(next), size + 1, max_size, seen, counts);
            for (std::int64_t a : added) seen.erase(a);
        }
    }
}

} // namespace

SequenceCount count_1d_sequences(int k) {
    if (k < 0 || k > 12) throw std::invalid_argument("count_1d_sequences: k must be in 0..12");
    SequenceCount s;
    s.k = k;
    s.count = sequences_from(0, 0, k);
    s.bound = std::pow(4.0, k);
    s.holds = static_cast<double>(s.count) <= s.bound;
    return s;
}

std::vector<AnimalCount> count_animals_upto(const std::string& lattice, int i_max) {
    const auto lat = lattice_of(lattice);
    if (i_max < 0 || i_max > 10) throw std::invalid_argument("count_animals: size must be in 0..10");
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(i_max) + 1, 0);
    counts[0] = 1;
    if (i_max > 0) {
        std::unordered_set<std::int64_t> seen{lat.anchor};
        redelmeier(lat, {lat.anchor}, 0, i_max, seen, counts);
    }
    std::vector<AnimalCount> out;
    for (int i = 0; i <= i_max; ++i) {
        AnimalCount a;
        a.lattice = lattice;
        a.i = i;
        a.count = counts[static_cast<std::size_t>(i)];
        a.K = lat.K;
        a.l0 = 1.0;
        a.bound = a.l0 * std::pow(a.K * std::exp(1.0), i);
        a.holds = static_cast<double>(a.count) <= a.bound;
        out.push_back(a);
    }
    return out;
}

AnimalCount count_animals(const std::string& lattice, int i) { return count_animals_upto(lattice, i).back(); }

} // namespace nzam
