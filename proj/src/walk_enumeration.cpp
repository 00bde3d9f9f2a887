#include "defaultgap/walk_enumeration.hpp"

#include <cmath>
#include <vector>

namespace defaultgap {

namespace {

void enumerate_paths(const LatticeWalk& walk, int j_star, int k_max, int depth,
                     int pos, double prob,
                     std::map<std::pair<int, int>, double>& law) {
    if (depth >= 1 && pos <= j_star) {
        law[{depth, pos}] += prob;
        return;
    }
    if (depth == k_max) return;
    for (std::size_t s = 0; s < walk.step_offsets.size(); ++s) {
        if (walk.step_probs[s] == 0.0) continue;
        enumerate_paths(walk, j_star, k_max, depth + 1, pos + walk.step_offsets[s],
                        prob * walk.step_probs[s], law);
    }
}

} // namespace

std::map<std::pair<int, int>, double> enumerate_first_passage(
    const LatticeWalk& walk, int j_star, int k_max) {
    walk.validate();
    std::map<std::pair<int, int>, double> law;
    enumerate_paths(walk, j_star, k_max, 0, 0, 1.0, law);
    return law;
}

double first_passage_tv_distance(const LatticeWalk& walk, double x0,
                                 double barrier, int k,
                                 LadderConvention convention) {
    const auto dp = joint_first_passage_law(walk, x0, barrier, k, convention);
    const int j_star = barrier_offset(walk, x0, barrier);
    const auto exact = enumerate_first_passage(walk, j_star, k);

    std::map<int, double> exact_k;
    for (const auto& [key, p] : exact) {
        if (key.first == k) exact_k[key.second] = p;
    }
    double tv = 0.0;
    for (const auto& [q, p] : dp.mass) {
        auto it = exact_k.find(q);
        const double e = it == exact_k.end() ? 0.0 : it->second;
        tv += std::fabs(p - e);
    }
    for (const auto& [q, e] : exact_k) {
        if (!dp.mass.count(q)) tv += e;
    }
    return 0.5 * tv;
}

namespace {

void enumerate_lemma(const LatticeWalk& walk, int x, int n_max,
                     LadderConvention convention, std::vector<int>& path,
                     double prob, std::map<LemmaCell, double>& cells) {
    const int n = static_cast<int>(path.size()) - 1; // steps taken
    const int pos = path.back();
    if (pos > x) {
        // sigma_x = n; decompose the pre-passage stretch path[0..n-1]
        int zmax = 0;
        for (int m = 0; m < n; ++m) zmax = std::max(zmax, path[m]);
        int theta;
        if (convention == LadderConvention::StrictAscWeakDesc) {
            theta = 0;
            while (path[theta] != zmax) ++theta; // first argmax
        } else {
            theta = n - 1;
            while (path[theta] != zmax) --theta; // last argmax
        }
        LemmaCell cell;
        cell.j = theta;
        cell.i = n - 1 - theta;
        cell.y = x - zmax;
        cell.v = x - path[n - 1];
        cell.u = pos - x;
        cells[cell] += prob;
        return;
    }
    if (n == n_max) return;
    for (std::size_t s = 0; s < walk.step_offsets.size(); ++s) {
        if (walk.step_probs[s] == 0.0) continue;
        path.push_back(pos + walk.step_offsets[s]);
        enumerate_lemma(walk, x, n_max, convention, path,
                        prob * walk.step_probs[s], cells);
        path.pop_back();
    }
}

} // namespace

std::map<LemmaCell, double> enumerate_lemma_cells(const LatticeWalk& walk, int x,
                                                  int n_max,
                                                  LadderConvention convention) {
    walk.validate();
    std::map<LemmaCell, double> cells;
    std::vector<int> path{0};
    enumerate_lemma(walk, x, n_max, convention, path, 1.0, cells);
    return cells;
}

} // namespace defaultgap
