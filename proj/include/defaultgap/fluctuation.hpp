#pragma once

#include <complex>
#include <map>
#include <vector>

#include "defaultgap/rng.hpp"

namespace defaultgap {

// Random walk on the lattice pitch * Z, given by its step law.
struct LatticeWalk {
    double pitch = 1.0;
    std::vector<int> step_offsets; // distinct, ascending
    std::vector<double> step_probs;

    void validate() const; // throws std::invalid_argument
    double prob(int offset) const;
    int min_offset() const;
    int max_offset() const;
    int max_abs_offset() const;
    int sample(RngStream& rng) const; // one step, CDF inversion
};

// Tie-breaking pairing for ladder epochs. The default counts a tie with the
// running extremum as a descending event (strict ascent / weak descent); the
// alternative is the mirrored pairing. Both decompose path space exactly, so
// first-passage laws assembled under either must agree.
enum class LadderConvention {
    StrictAscWeakDesc,
    WeakAscStrictDesc,
};

// Path-staying DP, which by time reversal equals the space-time Green
// function of the corresponding ladder process: e.g. the probability that the
// walk is strictly positive at times 1..n and ends at height j equals
// sum_i P[H_i^+ = j, T_i^+ = n] for strict ascending ladders.
enum class StayConstraint {
    StrictlyPositive,
    WeaklyNonnegative,
    StrictlyNegative,
    WeaklyNonpositive,
};

struct StayTables {
    StayConstraint constraint;
    int h_max; // heights (or depths) tracked in [0, h_max]
    int n_max;
    // dp[n][j]: walk satisfies the constraint through time n and sits at
    // height +j (ascending constraints) or -j (descending constraints).
    std::vector<std::vector<double>> dp;
    double truncated = 0.0; // probability mass that escaped above h_max

    double at(int j, int n) const;
};

StayTables stay_walk_dp(const LatticeWalk& walk, StayConstraint constraint,
                        int h_max, int n_max);

// Green functions U+ (ascending) and U- (descending) indexed by
// (height, epoch) under the chosen convention. The epoch-0 entry is the unit
// mass at the origin.
struct LadderTables {
    LadderConvention convention;
    StayTables ascending;
    StayTables descending;
};

// Throws TruncationTooSevere if either table's escaped mass exceeds
// max_truncation.
LadderTables build_ladder_tables(const LatticeWalk& walk, int h_max, int n_max,
                                 LadderConvention convention =
                                     LadderConvention::StrictAscWeakDesc,
                                 double max_truncation = 1.0);

// Joint law of (tau_r = k N, log S_{tau_r}) for the walk started at log(x0)
// with barrier D: the first epoch at which the walk position drops to
// log(D/x0) or below, assembled as the ladder-decomposition convolution
//   sum_{n1 + i = k-1} U^-(dz, n1) U^+(dv, i) F(step into the barrier).
struct FirstPassageLaw {
    int k = 0;
    double log_x0 = 0.0;
    double pitch = 1.0;
    // terminal walk offset q (log S = log_x0 + pitch q) -> probability
    std::map<int, double> mass;
    double truncation_bound = 0.0;

    double total() const; // = u_k(x0)
    double log_value(int offset) const { return log_x0 + pitch * offset; }
};

// h_max < 0 picks the exact bound (k * max |step|) for bounded-support walks.
FirstPassageLaw joint_first_passage_law(const LatticeWalk& walk, double x0,
                                        double barrier, int k,
                                        LadderConvention convention =
                                            LadderConvention::StrictAscWeakDesc,
                                        int h_max = -1);

// Barrier threshold in lattice units: largest integer j with
// pitch * j <= -log(x0/barrier), snapped when log(x0/barrier) sits on the
// lattice up to rounding error.
int barrier_offset(const LatticeWalk& walk, double x0, double barrier);

// Both sides of the Fristedt identity
//   1 - E[r^{T1+} e^{i t H1+}] = exp(-sum_{n>=1} r^n/n E[e^{i t M_n}; M_n > 0])
// for the strict ascending first ladder epoch/height, truncated at n_star
// with proven geometric tail bounds.
struct FristedtCheck {
    std::complex<double> lhs;
    std::complex<double> rhs;
    double lhs_tail = 0.0;
    double rhs_tail = 0.0;      // tail of the exponent series
    double combined_bound = 0.0; // bound on |lhs - rhs| from truncation alone
};

FristedtCheck fristedt_check(const LatticeWalk& walk, double r, double t,
                             int n_star = 160);

// Mass of one cell of the first-passage-over-a-level decomposition: the walk
// first exceeds level x (integer units) with pre-passage maximum at height
// x - y reached at epoch j, then i further epochs ending v below the level,
// then one step of size u + v. Product of the two Green-function masses and
// the step law under the chosen convention.
double ladder_lemma_law(const LatticeWalk& walk, int x, int i, int j, int y,
                        int v, int u,
                        LadderConvention convention =
                            LadderConvention::StrictAscWeakDesc);

} // namespace defaultgap
