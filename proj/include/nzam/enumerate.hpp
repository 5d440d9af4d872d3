// enumerate.hpp: exhaustive bond-sequence and lattice-animal counts

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nzam {

struct SequenceCount {
    int k = 0;
    std::uint64_t count = 0;
    double bound = 0.0; // 4^k
    bool holds = false;
};

// Sequences (l0, ..., lk) of half-line bonds with l0 = 0 (the A-C1 bond) where
// each bond overlaps the previous one or the boundary site of the graph so far.
SequenceCount count_1d_sequences(int k);

struct AnimalCount {
    std::string lattice;
    int i = 0;
    std::uint64_t count = 0;
    double K = 0.0;     // valence
    double l0 = 1.0;    // seed bonds
    double bound = 0.0; // l0 (K e)^i
    bool holds = false;
};

// Connected animals of i bonds that contain the anchor bond. "1d" is the
// half-line with anchor (0,1); "square" is Z^2 with anchor (0,0)-(1,0).
AnimalCount count_animals(const std::string& lattice, int i);
// Counts for every size 0..i_max in one enumeration.
std::vector<AnimalCount> count_animals_upto(const std::string& lattice, int i_max);

} // namespace nzam
