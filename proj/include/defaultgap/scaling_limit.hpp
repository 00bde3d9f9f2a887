#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "defaultgap/rng.hpp"

namespace defaultgap {

// Observed per-interval log returns Y_k = log(S_{Nk}/S_{N(k-1)}).
struct ReturnSeries {
    std::vector<double> values;
    double n_interval = 1.0; // N
};

struct GaussianReturns {
    double mean = 0.0;
    double sd = 1.0;
};
struct DiscreteReturns {
    std::vector<double> values;
    std::vector<double> probs;
};
struct StableReturns {
    double alpha = 1.5;
    double scale = 1.0;
    double beta = 0.0;
};
using BaseReturns = std::variant<GaussianReturns, DiscreteReturns, StableReturns>;

enum class ZetaRule { SqrtN, PowerOneOverAlpha };

// Refinement of the base model: spacing N -> N/n, returns Y -> Y/zeta_n.
struct RescaledModel {
    BaseReturns base;
    double n_interval = 1.0;
    int n = 1;
    ZetaRule zeta = ZetaRule::SqrtN;
};

double zeta_factor(const RescaledModel& model);

// log E[e^{s Y}] of the base return; throws NoExponentialMoment for stable
// returns.
double log_mgf(const BaseReturns& base, double s);

double sample_base_return(const BaseReturns& base, RngStream& rng);

// phi_n(t) = log E[exp(sum_{k <= [nt/N]} Y_k / zeta_n)].
double compensator(const RescaledModel& model, double t);

// First-passage density of exp((sigma/sqrt(N)) B_t - (sigma^2/2N) t) from x
// down to `barrier` (the continuous-monitoring limit law). Nonnegative by
// construction; the |log(D/x)| prefactor makes the standard density of the
// underlying drifted Brownian motion.
double hitting_density_gbm(double x, double s, double sigma, double n_interval,
                           double barrier);

// Closed-form CDF of the same first-passage time (reflection principle).
double hitting_cdf_gbm(double x, double t, double sigma, double n_interval,
                       double barrier);

struct WindowEstimate {
    double p = 0.0;
    double se = 0.0;
    std::int64_t n_paths = 0;
};

// Monte Carlo estimate of P_x[T1 < tau_r <= T2] under monitoring spacing N/n
// with risk-neutral compensation per step (skipped for stable returns).
WindowEstimate default_window_probability(const RescaledModel& model, double s0,
                                          double barrier, double t1, double t2,
                                          std::int64_t n_paths,
                                          std::uint64_t seed, int threads = 1);

struct SigmaFEstimate {
    double sigma_f = 0.0;
    double std_err = 0.0; // delete-a-block jackknife
};

// Plug-in estimator of sigma_f^2 = (E[Y^2] + 2 sum_{k>=1} Cov(Y_1, Y_{1+k}))/N
// with autocovariances up to lag_cutoff. The default follows the formula
// literally (uncentered second moment, centered covariances); `centered`
// swaps in the variance.
SigmaFEstimate estimate_sigma_f(const ReturnSeries& series, int lag_cutoff,
                                bool centered = false);

struct HillEstimate {
    double alpha = 0.0;
    double std_err = 0.0; // asymptotic alpha/sqrt(k)
    int k = 0;
};

// Hill estimator from the top k_order statistics of |Y|.
HillEstimate estimate_tail_index(const ReturnSeries& series, int k_order);

// CDF/quantile of the symmetric alpha-stable law with characteristic function
// exp(-(c|t|)^alpha), by numerical inversion. Serves as the independent
// oracle for the sampler and the scaling-limit checks.
double stable_cdf(double x, double alpha, double scale);
double stable_quantile(double p, double alpha, double scale);

struct StableLimitReport {
    std::vector<int> n_grid;
    std::vector<double> ks; // KS distance to the stable limit law at each n
    bool decreasing = false;
};

// Marginal law of log S^n_1 for base returns "stable + Uniform[-w, w]"
// compared against the exact stable limit; the perturbation washes out under
// n^{1/alpha} scaling, so the KS distances should fall as n grows. w = 0
// makes every n exact (self-similarity).
StableLimitReport stable_limit_check(double alpha, double scale,
                                     const std::vector<int>& n_grid,
                                     std::int64_t n_paths, std::uint64_t seed,
                                     double perturb_half_width = 2.0,
                                     int threads = 1);

} // namespace defaultgap
