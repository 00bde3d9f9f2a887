#include <doctest.h>

#include <cmath>
#include <vector>

#include "defaultgap/errors.hpp"
#include "defaultgap/quadrature.hpp"
#include "defaultgap/rng.hpp"
#include "defaultgap/scaling_limit.hpp"
#include "defaultgap/stats.hpp"

using namespace defaultgap;

TEST_CASE("compensator closed form and numeric log-mgf") {
    const double n_interval = 0.25;
    const double sd_y = 0.25 * std::sqrt(n_interval);
    RescaledModel model{GaussianReturns{0.0, sd_y}, n_interval, 4, ZetaRule::SqrtN};
    CHECK(compensator(model, 0.0) == 0.0);
    // [n t / N] = 4 steps at t = N: phi = 4 sigma_Y^2 / (2 n)
    CHECK(compensator(model, n_interval) ==
          doctest::Approx(4.0 * sd_y * sd_y / 8.0).epsilon(1e-14));

    // bounded three-point returns: numeric log-MGF against Monte Carlo
    DiscreteReturns three{{-0.02, 0.0, 0.03}, {0.3, 0.45, 0.25}};
    RescaledModel dmodel{three, n_interval, 4, ZetaRule::SqrtN};
    const double lam = log_mgf(dmodel.base, 1.0 / zeta_factor(dmodel));
    RngStream rng(1, 0);
    const int n = 1000000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = std::exp(sample_base_return(dmodel.base, rng) / 2.0);
        acc += e;
        acc2 += e * e;
    }
    const double mean = acc / n;
    const double se = std::sqrt((acc2 / n - mean * mean) / n);
    // delta method: sd(log mean) ~ se / mean
    CHECK(std::fabs(std::log(mean) - lam) < 3.0 * se / mean);

    RescaledModel stable{StableReturns{1.5, 1.0, 0.0}, n_interval, 4,
                         ZetaRule::PowerOneOverAlpha};
    CHECK_THROWS_AS(compensator(stable, 1.0), NoExponentialMoment);
}

TEST_CASE("hitting density domain and closed values") {
    CHECK(hitting_density_gbm(0.4, 1.0, 0.25, 1.0, 0.4) == 0.0); // x at the barrier
    CHECK_THROWS_AS(hitting_density_gbm(0.3, 1.0, 0.25, 1.0, 0.4), OutOfDomain);
    CHECK_THROWS_AS(hitting_density_gbm(1.0, -1.0, 0.25, 1.0, 0.4), OutOfDomain);
    for (double s : {0.01, 0.5, 3.0, 50.0}) {
        CHECK(hitting_density_gbm(std::exp(1.0), s, 1.0, 1.0, 1.0) >= 0.0);
    }
}

TEST_CASE("hitting density integrates to the reflection-principle mass") {
    // x = e D, sigma = 1, N = 1: compare cumulative quadrature with the
    // closed-form first-passage CDF, and check the total mass never exceeds 1
    const double x = std::exp(1.0), sigma = 1.0, n_interval = 1.0, d = 1.0;
    for (double t : {0.5, 2.0, 10.0}) {
        const double quad = integrate(
            [&](double s) {
                return s <= 0.0 ? 0.0 : hitting_density_gbm(x, s, sigma, n_interval, d);
            },
            0.0, t, 1e-10);
        const double closed = hitting_cdf_gbm(x, t, sigma, n_interval, d);
        CHECK(std::fabs(quad - closed) < 1e-8);
        CHECK(quad <= 1.0 + 1e-10);
    }
    // drift -sigma^2/2 points at the barrier: passage is certain eventually
    CHECK(hitting_cdf_gbm(x, 4000.0, sigma, n_interval, d) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("window probability edge cases") {
    RescaledModel model{GaussianReturns{0.0, 0.25}, 1.0, 4, ZetaRule::SqrtN};
    const auto zero_window = default_window_probability(model, 1.0, 0.7, 1.0, 1.0, 100, 1);
    CHECK(zero_window.p == 0.0);
    const auto zero_barrier = default_window_probability(model, 1.0, 0.0, 0.0, 2.0, 100, 1);
    CHECK(zero_barrier.p == 0.0);
    CHECK_THROWS_AS(default_window_probability(model, 0.5, 0.7, 0.0, 1.0, 100, 1),
                    BadStart);
}

TEST_CASE("window probabilities converge to the continuous-passage law") {
    // Per-interval return sd sigma sqrt(N) with sigma = 0.2, N = 0.02; the
    // limit is the first-passage law of the sigma-GBM.
    const double sigma = 0.2, n_interval = 0.02, d = 0.75, t2 = 1.0;
    const double sd_y = sigma * std::sqrt(n_interval);
    const double oracle = hitting_cdf_gbm(1.0, t2, sd_y, n_interval, d);
    std::vector<double> gaps, ses;
    for (int n : {1, 4, 16}) {
        RescaledModel model{GaussianReturns{0.0, sd_y}, n_interval, n, ZetaRule::SqrtN};
        const auto est = default_window_probability(model, 1.0, d, 0.0, t2, 20000, 2718, 1);
        gaps.push_back(std::fabs(est.p - oracle));
        ses.push_back(est.se);
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
    CHECK(gaps[2] < 3.0 * ses[2]);
}

TEST_CASE("sigma_f estimator recovery and conventions") {
    const double n_interval = 0.25;
    // constant series: literal formula gives c/sqrt(N), centered gives 0
    ReturnSeries constant{std::vector<double>(400, 0.03), n_interval};
    CHECK(estimate_sigma_f(constant, 0).sigma_f ==
          doctest::Approx(0.03 / std::sqrt(n_interval)).epsilon(1e-12));
    CHECK(estimate_sigma_f(constant, 0, /*centered=*/true).sigma_f ==
          doctest::Approx(0.0));

    // i.i.d. recovery within 3 jackknife SEs
    RngStream rng(9, 0);
    ReturnSeries iid{std::vector<double>(100000), n_interval};
    for (auto& v : iid.values) v = 0.25 * std::sqrt(n_interval) * rng.normal();
    const auto est = estimate_sigma_f(iid, 0);
    CHECK(std::fabs(est.sigma_f - 0.25) < 3.0 * est.std_err);

    // AR(1) long-run variance with closed-form target
    const double rho = 0.5;
    ReturnSeries ar{std::vector<double>(1000000), n_interval};
    double y = 0.0;
    const double innovation_sd = 0.25 * (1.0 - rho) * std::sqrt(n_interval);
    for (auto& v : ar.values) {
        y = rho * y + innovation_sd * rng.normal();
        v = y;
    }
    const auto ar_est = estimate_sigma_f(ar, 50);
    CHECK(std::fabs(ar_est.sigma_f / 0.25 - 1.0) < 0.05);

    CHECK_THROWS_AS(estimate_sigma_f({{0.1, 0.2}, 1.0}, 5), SeriesTooShort);
}

TEST_CASE("sigma_f is invariant under series reversal") {
    RngStream rng(12, 0);
    ReturnSeries series{std::vector<double>(5000), 0.5};
    double y = 0.0;
    for (auto& v : series.values) {
        y = 0.3 * y + 0.1 * rng.normal() + 0.01;
        v = y;
    }
    ReturnSeries reversed = series;
    std::reverse(reversed.values.begin(), reversed.values.end());
    for (int lag : {0, 3, 10}) {
        CHECK(std::fabs(estimate_sigma_f(series, lag).sigma_f -
                        estimate_sigma_f(reversed, lag).sigma_f) < 1e-12);
    }
}

TEST_CASE("hill estimator") {
    // deterministic fixture: k top values at e^{1/alpha}, the rest at 1
    const double alpha = 1.7;
    const int n = 5000, k = 400;
    ReturnSeries fixture{std::vector<double>(n, 1.0), 1.0};
    for (int i = 0; i < k; ++i) fixture.values[i] = std::exp(1.0 / alpha);
    const auto det = estimate_tail_index(fixture, k);
    CHECK(det.alpha == doctest::Approx(alpha).epsilon(1e-10));
    CHECK(det.std_err == doctest::Approx(alpha / std::sqrt(1.0 * k)).epsilon(1e-10));

    // Pareto(1.5) recovery within 3 SE
    RngStream rng(15, 0);
    ReturnSeries pareto{std::vector<double>(100000), 1.0};
    for (auto& v : pareto.values) v = std::pow(rng.uniform(), -1.0 / 1.5);
    const auto est = estimate_tail_index(pareto, 1000);
    CHECK(std::fabs(est.alpha - 1.5) < 3.0 * est.std_err);

    // Gaussian samples: the estimate drifts upward in k (diagnostic)
    ReturnSeries gauss{std::vector<double>(100000), 1.0};
    for (auto& v : gauss.values) v = rng.normal();
    CHECK(estimate_tail_index(gauss, 5000).alpha >
          estimate_tail_index(gauss, 500).alpha);

    CHECK_THROWS_AS(estimate_tail_index({{1.0, 2.0}, 1.0}, 5), SeriesTooShort);
}

TEST_CASE("stable cdf oracle") {
    // alpha = 1: Cauchy in closed form
    for (double x : {-3.0, -0.5, 0.0, 0.2, 1.0, 8.0}) {
        const double expected = 0.5 + std::atan(x / 1.3) / 3.14159265358979323846;
        CHECK(stable_cdf(x, 1.0, 1.3) == doctest::Approx(expected).epsilon(1e-8));
    }
    // symmetry and monotonicity
    CHECK(stable_cdf(0.7, 1.5, 1.0) + stable_cdf(-0.7, 1.5, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    double prev = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.5) {
        const double f = stable_cdf(x, 1.5, 1.0);
        CHECK(f >= prev - 1e-12);
        prev = f;
    }
    // continuity across the tail-series switch
    CHECK(std::fabs(stable_cdf(29.99, 1.5, 1.0) - stable_cdf(30.01, 1.5, 1.0)) < 1e-6);
    // quantile round trip
    for (double p : {0.6, 0.9, 0.99}) {
        CHECK(stable_cdf(stable_quantile(p, 1.5, 1.0), 1.5, 1.0) ==
              doctest::Approx(p).epsilon(1e-7));
    }
}

TEST_CASE("sampler agrees with the cdf oracle") {
    RngStream rng(33, 0);
    std::vector<double> xs(30000);
    for (auto& x : xs) x = 0.8 * rng.stable(1.5, 0.0);
    const double ks =
        ks_statistic(xs, [](double x) { return stable_cdf(x, 1.5, 0.8); });
    CHECK(ks < 0.012);
}

TEST_CASE("stable limit checks") {
    CHECK_THROWS_AS(stable_limit_check(2.0, 1.0, {1}, 100, 1), std::invalid_argument);

    // exactly stable base: self-similarity makes every n exact
    const auto exact = stable_limit_check(1.5, 1.0, {1}, 30000, 91, 0.0, 1);
    CHECK(exact.ks[0] < 2.0 * 1.36 / std::sqrt(30000.0));

    // perturbed base: the KS distance to the limit falls with n
    const auto report = stable_limit_check(1.5, 1.0, {1, 10, 100}, 30000, 92, 2.0, 2);
    CHECK(report.decreasing);
    CHECK(report.ks[2] < report.ks[0]);
}
