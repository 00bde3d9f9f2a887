#include "defaultgap/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "defaultgap/errors.hpp"

namespace defaultgap {

void LatticeWalk::validate() const {
    if (!(pitch > 0.0)) throw std::invalid_argument("lattice pitch must be > 0");
    if (step_offsets.empty() || step_offsets.size() != step_probs.size()) {
        throw std::invalid_argument("lattice walk: offsets/probs size mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < step_offsets.size(); ++i) {
        if (i > 0 && step_offsets[i] <= step_offsets[i - 1]) {
            throw std::invalid_argument("lattice walk: offsets must be ascending");
        }
        if (!(step_probs[i] >= 0.0)) {
            throw std::invalid_argument("lattice walk: negative step probability");
        }
        total += step_probs[i];
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("lattice walk: probabilities must sum to 1");
    }
}

double LatticeWalk::prob(int offset) const {
    for (std::size_t i = 0; i < step_offsets.size(); ++i) {
        if (step_offsets[i] == offset) return step_probs[i];
    }
    return 0.0;
}

int LatticeWalk::min_offset() const { return step_offsets.front(); }
int LatticeWalk::max_offset() const { return step_offsets.back(); }

int LatticeWalk::max_abs_offset() const {
    return std::max(std::abs(min_offset()), std::abs(max_offset()));
}

int LatticeWalk::sample(RngStream& rng) const {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < step_offsets.size(); ++i) {
        cum += step_probs[i];
        if (u <= cum) return step_offsets[i];
    }
    return step_offsets.back();
}

double StayTables::at(int j, int n) const {
    if (n < 0 || n > n_max || j < 0 || j > h_max) return 0.0;
    return dp[n][j];
}

StayTables stay_walk_dp(const LatticeWalk& walk, StayConstraint constraint,
                        int h_max, int n_max) {
    walk.validate();
    if (h_max < 0 || n_max < 0) throw std::invalid_argument("stay_walk_dp: bad bounds");

    const bool ascending = constraint == StayConstraint::StrictlyPositive ||
                           constraint == StayConstraint::WeaklyNonnegative;
    const bool strict = constraint == StayConstraint::StrictlyPositive ||
                        constraint == StayConstraint::StrictlyNegative;

    StayTables t;
    t.constraint = constraint;
    t.h_max = h_max;
    t.n_max = n_max;
    t.dp.assign(n_max + 1, std::vector<double>(h_max + 1, 0.0));
    t.dp[0][0] = 1.0;

    for (int n = 1; n <= n_max; ++n) {
        for (int j = 0; j <= h_max; ++j) {
            const double p = t.dp[n - 1][j];
            if (p == 0.0) continue;
            for (std::size_t s = 0; s < walk.step_offsets.size(); ++s) {
                const double f = walk.step_probs[s];
                if (f == 0.0) continue;
                // position after the step, in signed units
                const int pos = (ascending ? j : -j) + walk.step_offsets[s];
                const int nj = ascending ? pos : -pos;
                const bool ok = ascending ? (strict ? pos >= 1 : pos >= 0)
                                          : (strict ? pos <= -1 : pos <= 0);
                if (!ok) continue;
                if (nj > h_max) {
                    t.truncated += p * f;
                    continue;
                }
                t.dp[n][nj] += p * f;
            }
        }
    }
    return t;
}

LadderTables build_ladder_tables(const LatticeWalk& walk, int h_max, int n_max,
                                 LadderConvention convention,
                                 double max_truncation) {
    const bool strict_up = convention == LadderConvention::StrictAscWeakDesc;
    LadderTables tables{
        convention,
        stay_walk_dp(walk,
                     strict_up ? StayConstraint::StrictlyPositive
                               : StayConstraint::WeaklyNonnegative,
                     h_max, n_max),
        stay_walk_dp(walk,
                     strict_up ? StayConstraint::WeaklyNonpositive
                               : StayConstraint::StrictlyNegative,
                     h_max, n_max)};
    const double worst =
        std::max(tables.ascending.truncated, tables.descending.truncated);
    if (worst > max_truncation) {
        throw TruncationTooSevere("ladder tables: escaped mass " +
                                  std::to_string(worst) + " exceeds bound " +
                                  std::to_string(max_truncation));
    }
    return tables;
}

int barrier_offset(const LatticeWalk& walk, double x0, double barrier) {
    if (!(x0 > barrier) || !(barrier > 0.0)) {
        throw std::invalid_argument("barrier_offset: needs x0 > barrier > 0");
    }
    const double raw = -std::log(x0 / barrier) / walk.pitch;
    const double snapped = std::round(raw);
    if (std::fabs(raw - snapped) < 1e-9) return static_cast<int>(snapped);
    return static_cast<int>(std::floor(raw));
}

double FirstPassageLaw::total() const {
    double s = 0.0;
    for (const auto& [q, p] : mass) s += p;
    return s;
}

FirstPassageLaw joint_first_passage_law(const LatticeWalk& walk, double x0,
                                        double barrier, int k,
                                        LadderConvention convention,
                                        int h_max) {
    walk.validate();
    if (k < 1) throw std::invalid_argument("joint_first_passage_law: k >= 1");
    const int j_star = barrier_offset(walk, x0, barrier);
    if (j_star >= 0) {
        throw std::invalid_argument("joint_first_passage_law: start at or below barrier");
    }
    if (h_max < 0) h_max = k * walk.max_abs_offset();

    // Pre-passage paths are split at the first attainment of their running
    // minimum: a strict-descent stretch to depth z, a weakly-nonnegative
    // stretch climbing v above the minimum, then the step through the
    // barrier. Under the mirrored convention the split is at the last
    // attainment and the strictness swaps sides. The tables track the full
    // height range (the reversed stretches pass through depths beyond their
    // endpoints); only the read-out depth is capped by the barrier.
    const bool strict_desc = convention == LadderConvention::StrictAscWeakDesc;
    const int z_cap = std::min(-j_star - 1, h_max);
    const StayTables down =
        stay_walk_dp(walk,
                     strict_desc ? StayConstraint::StrictlyNegative
                                 : StayConstraint::WeaklyNonpositive,
                     h_max, k - 1);
    const StayTables up =
        stay_walk_dp(walk,
                     strict_desc ? StayConstraint::WeaklyNonnegative
                                 : StayConstraint::StrictlyPositive,
                     h_max, k - 1);

    FirstPassageLaw law;
    law.k = k;
    law.log_x0 = std::log(x0);
    law.pitch = walk.pitch;
    law.truncation_bound = down.truncated + up.truncated;

    for (int n1 = 0; n1 <= k - 1; ++n1) {
        const int i = k - 1 - n1;
        for (int z = 0; z <= z_cap; ++z) {
            const double dmass = down.at(z, n1);
            if (dmass == 0.0) continue;
            for (int v = 0; v <= h_max; ++v) {
                const double umass = up.at(v, i);
                if (umass == 0.0) continue;
                const int pos = v - z; // walk position before the final step
                for (std::size_t s = 0; s < walk.step_offsets.size(); ++s) {
                    const int q = pos + walk.step_offsets[s];
                    if (q > j_star) continue;
                    law.mass[q] += dmass * umass * walk.step_probs[s];
                }
            }
        }
    }
    return law;
}

FristedtCheck fristedt_check(const LatticeWalk& walk, double r, double t,
                             int n_star) {
    walk.validate();
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("fristedt: r in (0,1)");
    if (n_star < 1) throw std::invalid_argument("fristedt: n_star >= 1");

    const int reach = n_star * walk.max_abs_offset();
    const std::complex<double> i1(0.0, 1.0);

    // lhs: first strict ascending ladder (T, H); the prefix stays weakly
    // nonpositive, then one step lands strictly above the origin.
    const StayTables prefix =
        stay_walk_dp(walk, StayConstraint::WeaklyNonpositive, reach, n_star - 1);
    std::complex<double> transform = 0.0;
    double rn = r;
    for (int n = 1; n <= n_star; ++n, rn *= r) {
        std::complex<double> level = 0.0;
        for (int p = 0; p <= prefix.h_max; ++p) {
            const double mass = prefix.at(p, n - 1);
            if (mass == 0.0) continue;
            for (std::size_t s = 0; s < walk.step_offsets.size(); ++s) {
                const int h = -p + walk.step_offsets[s];
                if (h < 1) continue;
                level += mass * walk.step_probs[s] *
                         std::exp(i1 * (t * walk.pitch * h));
            }
        }
        transform += rn * level;
    }

    // rhs: exp(-sum r^n/n E[e^{i t M_n}; M_n > 0]) from the unrestricted walk.
    std::vector<double> law(2 * reach + 1, 0.0); // index pos + reach
    law[reach] = 1.0;
    std::complex<double> exponent = 0.0;
    rn = r;
    for (int n = 1; n <= n_star; ++n, rn *= r) {
        std::vector<double> next(law.size(), 0.0);
        for (int idx = 0; idx < static_cast<int>(law.size()); ++idx) {
            const double p = law[idx];
            if (p == 0.0) continue;
            for (std::size_t s = 0; s < walk.step_offsets.size(); ++s) {
                const int nidx = idx + walk.step_offsets[s];
                if (nidx < 0 || nidx >= static_cast<int>(law.size())) continue;
                next[nidx] += p * walk.step_probs[s];
            }
        }
        law.swap(next);
        std::complex<double> positive_part = 0.0;
        for (int pos = 1; pos <= reach; ++pos) {
            const double p = law[pos + reach];
            if (p == 0.0) continue;
            positive_part += p * std::exp(i1 * (t * walk.pitch * pos));
        }
        exponent += (rn / static_cast<double>(n)) * positive_part;
    }

    FristedtCheck out;
    out.lhs = 1.0 - transform;
    out.rhs = std::exp(-exponent);
    const double rtail = std::pow(r, n_star + 1) / (1.0 - r);
    out.lhs_tail = rtail;
    out.rhs_tail = rtail / static_cast<double>(n_star + 1);
    out.combined_bound =
        out.lhs_tail + std::abs(out.rhs) * std::expm1(out.rhs_tail) + 1e-12;
    return out;
}

double ladder_lemma_law(const LatticeWalk& walk, int x, int i, int j, int y,
                        int v, int u, LadderConvention convention) {
    walk.validate();
    if (x < 0 || i < 0 || j < 0) throw std::invalid_argument("lemma: bad indices");
    if (y < 0 || y > x || v < y || u < 1) return 0.0;

    // Track the full reachable range: the reversed stretches may overshoot
    // their endpoint heights in between.
    const bool strict_up = convention == LadderConvention::StrictAscWeakDesc;
    const StayTables up =
        stay_walk_dp(walk,
                     strict_up ? StayConstraint::StrictlyPositive
                               : StayConstraint::WeaklyNonnegative,
                     j * walk.max_abs_offset(), j);
    const StayTables down =
        stay_walk_dp(walk,
                     strict_up ? StayConstraint::WeaklyNonpositive
                               : StayConstraint::StrictlyNegative,
                     i * walk.max_abs_offset(), i);
    return up.at(x - y, j) * down.at(v - y, i) * walk.prob(u + v);
}

} // namespace defaultgap
