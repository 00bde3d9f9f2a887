#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "defaultgap/levy_model.hpp"
#include "defaultgap/path_sim.hpp"
#include "defaultgap/rng.hpp"

namespace defaultgap {

struct DebtSchedule {
    double n_interval = 1.0;  // N, time between repayments
    double barrier = 0.5;     // D; 0 disables default entirely
    int horizon_payments = 40; // K

    void validate() const;
    double payment_time(int k) const { return n_interval * k; }
};

enum class DefaultStatus { Survived, Defaulted };

struct DefaultOutcome {
    DefaultStatus status = DefaultStatus::Survived;
    int payment_index = 0;          // k with tau_r = k N
    double tau_r = 0.0;
    double tau_e = 0.0;
    double gap = 0.0;               // tau_r - tau_e, in [0, N]
    double value_at_default = 0.0;  // S_{tau_r}
    double log_value_prev = 0.0;    // log S_{(k-1)N}, the pre-default value

    bool defaulted() const { return status == DefaultStatus::Defaulted; }
};

// Weighted samples of a scalar law; covers both genuine sample clouds and
// discrete laws such as (u_k)_k.
struct EmpiricalDistribution {
    std::vector<std::pair<double, double>> samples; // (value, weight)
    bool normalized = false;

    void add(double value, double weight = 1.0);
    double total_weight() const;
    void normalize(); // rescales weights to sum to one
    double mean() const;
    double quantile(double q) const;
    std::vector<double> values() const;
};

struct SimOptions {
    int bridge_depth = 12;       // tau_e resolution N 2^-depth for sigma > 0
    int pure_jump_substeps = 256; // sub-grid for alpha-stable intervals
    int threads = 1;
};

// --- single-path machinery ---------------------------------------------

struct RecordedDefault {
    DefaultStatus status = DefaultStatus::Survived;
    int payment_index = 0;
    double tau_r = 0.0;
    double log_value = 0.0; // log S at tau_r
};

// First k >= 1 with S_{kN} <= D, from the path sampled at payment dates
// (log_values[k] = log S_{kN}, k = 0..K). Throws BadStart if S_0 <= D.
RecordedDefault recorded_default(std::span<const double> log_values,
                                 const DebtSchedule& schedule);

// Sampler context for one monitoring interval: endpoints plus whatever
// interior structure the model requires to refine tau_e.
struct IntervalPath {
    double x_start = 0.0;
    double x_end = 0.0;
    struct Jump {
        double t;         // offset into the interval
        double x_before;  // left limit
        double x_after;   // value at t (upward jumps only)
    };
    std::vector<Jump> jumps;      // compound-Poisson interior events
    std::vector<double> subgrid;  // alpha-stable sub-grid values (m+1 points)
};

IntervalPath sample_interval(const LevyModel& model, double x_start, double dt,
                             RngStream& rng, const SimOptions& opts);

// Last time within the defaulted interval at which S >= D, located exactly
// (bridges between jumps for sigma > 0, line segments for finite-activity
// pure-jump models) or on the sub-grid for alpha-stable dynamics. Returns the
// offset into the interval; requires x_start > log_barrier >= x_end.
double economic_default(const IntervalPath& interval, double dt,
                        double log_barrier, const LevyModel& model,
                        RngStream& rng, const SimOptions& opts);

// First time within an interval at which S <= D, or nullopt when the interval
// never touches the barrier (used by the restart-at-the-barrier route).
std::optional<double> first_passage_in_interval(const IntervalPath& interval,
                                                double dt, double log_barrier,
                                                const LevyModel& model,
                                                RngStream& rng,
                                                const SimOptions& opts);

// One full simulated outcome: recorded default scan plus tau_e refinement.
DefaultOutcome sample_default_outcome(const FirmValue& firm,
                                      const DebtSchedule& schedule,
                                      RngStream& rng, const SimOptions& opts = {});

// --- estimators ----------------------------------------------------------

// Outcomes for paths (stream ids 0..n_paths-1 under the given seed); the
// path -> stream mapping makes results independent of thread count.
std::vector<DefaultOutcome> simulate_outcomes(const FirmValue& firm,
                                              const DebtSchedule& schedule,
                                              std::int64_t n_paths,
                                              std::uint64_t seed,
                                              const SimOptions& opts = {},
                                              bool need_tau_e = true);

struct DefaultProbEstimate {
    EmpiricalDistribution u;      // value = payment index k, weight = u_k
    std::vector<double> std_err;  // binomial SE per k (index 0 unused)
    double p_default = 0.0;       // sum of u_k
    std::int64_t n_paths = 0;
};

DefaultProbEstimate estimate_default_probabilities(const FirmValue& firm,
                                                   const DebtSchedule& schedule,
                                                   std::int64_t n_paths,
                                                   std::uint64_t seed,
                                                   const SimOptions& opts = {});

struct GapConditioning {
    enum class Kind { Unconditional, GivenDefault, GivenTauR } kind =
        Kind::GivenDefault;
    int payment_index = 0; // for GivenTauR

    static GapConditioning unconditional() { return {Kind::Unconditional, 0}; }
    static GapConditioning given_default() { return {Kind::GivenDefault, 0}; }
    static GapConditioning given_tau_r(int k) { return {Kind::GivenTauR, k}; }
};

// Gap samples under the requested conditioning. Unconditional keeps weight
// 1/n_paths per defaulted path, so the result is a sub-probability law with
// total mass P[default within horizon]. Throws NoDefaults when no path
// matches the conditioning.
EmpiricalDistribution estimate_gap_distribution(const FirmValue& firm,
                                                const DebtSchedule& schedule,
                                                std::int64_t n_paths,
                                                std::uint64_t seed,
                                                const GapConditioning& cond,
                                                const SimOptions& opts = {});

EmpiricalDistribution gap_distribution_from(const std::vector<DefaultOutcome>&,
                                            const GapConditioning& cond);

struct DefaultTimeDistributions {
    EmpiricalDistribution tau_e; // among defaulted paths, normalized
    EmpiricalDistribution tau_r;
    EmpiricalDistribution gap;
    std::int64_t defaulted = 0;
    std::int64_t n_paths = 0;
};

DefaultTimeDistributions estimate_tau_e_distribution(const FirmValue& firm,
                                                     const DebtSchedule& schedule,
                                                     std::int64_t n_paths,
                                                     std::uint64_t seed,
                                                     const SimOptions& opts = {});

} // namespace defaultgap
