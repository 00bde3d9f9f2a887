#pragma once

#include <map>

#include "defaultgap/fluctuation.hpp"

namespace defaultgap {

// Brute-force validation oracles for the ladder-decomposition formulas:
// complete enumeration of step sequences, exponential in the horizon, meant
// for small cases only. Deliberately independent of the DP code paths.

// Exact joint law P[tau = k, M_tau = q] of the first epoch at which the walk
// drops to j_star or below, for every k <= k_max. Keys are (k, q).
std::map<std::pair<int, int>, double> enumerate_first_passage(
    const LatticeWalk& walk, int j_star, int k_max);

// Total variation distance between the DP law for payment index k and the
// enumerated law restricted to that k.
double first_passage_tv_distance(const LatticeWalk& walk, double x0,
                                 double barrier, int k,
                                 LadderConvention convention =
                                     LadderConvention::StrictAscWeakDesc);

// Exact joint histogram of the first-passage-above-x decomposition cells
// (i, j, y, v, u) for paths with sigma_x <= n_max; theta is the first or last
// argmax epoch depending on the convention.
struct LemmaCell {
    int i, j, y, v, u;
    bool operator<(const LemmaCell& o) const {
        if (i != o.i) return i < o.i;
        if (j != o.j) return j < o.j;
        if (y != o.y) return y < o.y;
        if (v != o.v) return v < o.v;
        return u < o.u;
    }
};

std::map<LemmaCell, double> enumerate_lemma_cells(const LatticeWalk& walk, int x,
                                                  int n_max,
                                                  LadderConvention convention);

} // namespace defaultgap
