#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "defaultgap/arcsine.hpp"
#include "defaultgap/default_times.hpp"
#include "defaultgap/errors.hpp"
#include "defaultgap/fluctuation.hpp"
#include "defaultgap/stats.hpp"

using namespace defaultgap;

namespace {

// Compound-Poisson model whose payment-date increments live on the unit
// lattice: drift -2 per interval, unit point-mass jumps (uncompensated since
// the jump size is not below 1).
FirmValue lattice_firm() {
    return {1.0, LevyModel::jump_diffusion(-2.0, 0.0, {1.2, PointMassJumps{1.0}})};
}

LatticeWalk lattice_walk_of(double lambda, int j_cap) {
    LatticeWalk walk;
    walk.pitch = 1.0;
    double cum = 0.0;
    for (int j = 0; j <= j_cap; ++j) {
        const double p = std::exp(-lambda + j * std::log(lambda) - std::lgamma(j + 1.0));
        walk.step_offsets.push_back(j - 2);
        walk.step_probs.push_back(p);
        cum += p;
    }
    walk.step_probs.back() += 1.0 - cum; // fold the negligible Poisson tail
    return walk;
}

} // namespace

TEST_CASE("recorded default scan") {
    const DebtSchedule sched{0.25, 0.5, 4};
    const double high = std::log(1.0); // = log(2 D)
    std::vector<double> flat(5, high);
    CHECK(recorded_default(flat, sched).status == DefaultStatus::Survived);

    // value exactly at the barrier triggers (boundary is inclusive)
    std::vector<double> boundary{high, std::log(0.5), high, high, high};
    const auto hit = recorded_default(boundary, sched);
    CHECK(hit.status == DefaultStatus::Defaulted);
    CHECK(hit.payment_index == 1);
    CHECK(hit.tau_r == doctest::Approx(0.25));

    std::vector<double> bad{std::log(0.5), high, high, high, high};
    CHECK_THROWS_AS(recorded_default(bad, sched), BadStart);
}

TEST_CASE("zero barrier never defaults") {
    const DebtSchedule sched{0.5, 0.0, 8};
    for (auto model : {LevyModel::brownian(-0.5, 0.3),
                       LevyModel::jump_diffusion(-1.0, 0.2, {0.5, PointMassJumps{0.4}})}) {
        for (int i = 0; i < 200; ++i) {
            RngStream rng(5, static_cast<std::uint64_t>(i));
            const auto out = sample_default_outcome({1.0, model}, sched, rng);
            CHECK(out.status == DefaultStatus::Survived);
        }
    }
}

TEST_CASE("deterministic model has closed-form default times") {
    const double b = -0.1, d = 0.7, n = 0.25;
    const FirmValue firm{1.0, LevyModel::brownian(b, 0.0)};
    const DebtSchedule sched{n, d, 40};
    RngStream rng(1, 0);
    const auto out = sample_default_outcome(firm, sched, rng);
    REQUIRE(out.defaulted());
    const int k_expected = static_cast<int>(std::ceil(std::log(d) / (b * n)));
    CHECK(out.payment_index == k_expected);
    CHECK(out.tau_r == doctest::Approx(k_expected * n).epsilon(1e-12));
    CHECK(out.tau_e == doctest::Approx(std::log(d) / b).epsilon(1e-9));
    CHECK(out.gap == doctest::Approx(k_expected * n - std::log(d) / b).epsilon(1e-9));
}

TEST_CASE("gap near the barrier start concentrates at N") {
    // S_0 = D + eps: economically the firm is broke almost immediately, so
    // conditional on default at the first payment the gap approaches N.
    const double sigma = 0.25, n = 0.25, d = 1.0;
    std::vector<double> means;
    for (double eps : {2e-2 * sigma * std::sqrt(n), 2e-4 * sigma * std::sqrt(n)}) {
        const FirmValue firm{d + eps, LevyModel::brownian(0.0, sigma)};
        const DebtSchedule sched{n, d, 1};
        double acc = 0.0;
        int cnt = 0;
        for (int i = 0; i < 40000; ++i) {
            RngStream rng(77, static_cast<std::uint64_t>(i));
            const auto out = sample_default_outcome(firm, sched, rng);
            if (out.defaulted()) {
                acc += out.gap;
                ++cnt;
            }
        }
        REQUIRE(cnt > 1000);
        means.push_back(acc / cnt);
    }
    CHECK(means[1] > means[0]);
    CHECK(means[1] > 0.8 * n);
}

TEST_CASE("gap law at the barrier is arcsine for driftless dynamics") {
    const double sigma = 0.25, n = 0.25, d = 1.0;
    const FirmValue firm{d * (1.0 + 1e-11), LevyModel::brownian(0.0, sigma)};
    const DebtSchedule sched{n, d, 1};
    std::vector<double> gaps;
    gaps.reserve(60000);
    for (int i = 0; gaps.size() < 100000 && i < 300000; ++i) {
        RngStream rng(88, static_cast<std::uint64_t>(i));
        const auto out = sample_default_outcome(firm, sched, rng);
        if (out.defaulted()) gaps.push_back(out.gap);
    }
    REQUIRE(gaps.size() == 100000);
    const double ks = ks_statistic(gaps, [n](double s) { return arcsine_cdf(s, n); });
    CHECK(ks < 0.01);
}

TEST_CASE("restart-at-the-barrier route matches the direct gap law") {
    // Prop-3.2-style factorization for spectrally positive dynamics: hit the
    // barrier continuously at time u, then restart an independent copy at the
    // barrier over [0, N - u], conditioned to end at or below it.
    const struct {
        LevyModel model;
        double s0;
    } cases[] = {
        {with_martingale_drift(LevyModel::brownian(0.0, 0.3)), 1.1},
        {with_martingale_drift(
             LevyModel::jump_diffusion(0.0, 0.2, {0.8, PointMassJumps{0.3}})),
         1.05},
    };
    const double d = 1.0, n = 1.0;
    const SimOptions opts;
    for (const auto& c : cases) {
        const FirmValue firm{c.s0, c.model};
        const DebtSchedule sched{n, d, 1};
        const double level = std::log(d);

        std::vector<double> direct;
        for (int i = 0; direct.size() < 100000 && i < 1000000; ++i) {
            RngStream rng(101, static_cast<std::uint64_t>(i));
            const auto out = sample_default_outcome(firm, sched, rng, opts);
            if (out.defaulted()) direct.push_back(out.gap);
        }
        std::vector<double> restart;
        for (int i = 0; restart.size() < 100000 && i < 4000000; ++i) {
            RngStream rng(202, static_cast<std::uint64_t>(i));
            const auto interval =
                sample_interval(c.model, std::log(c.s0), n, rng, opts);
            const auto h =
                first_passage_in_interval(interval, n, level, c.model, rng, opts);
            if (!h) continue;
            const double remain = n - *h;
            if (remain <= 0.0) {
                restart.push_back(0.0);
                continue;
            }
            const auto fresh = sample_interval(c.model, level, remain, rng, opts);
            if (fresh.x_end > level) continue; // conditioning on tau_r = N
            const double tau =
                economic_default(fresh, remain, level, c.model, rng, opts);
            restart.push_back(remain - tau);
        }
        REQUIRE(direct.size() == 100000);
        REQUIRE(restart.size() == 100000);
        CHECK(ks_statistic_two_sample(direct, restart) < 0.015);
    }
}

TEST_CASE("gap quantiles are stable under bridge-depth refinement") {
    const FirmValue firm{1.0, LevyModel::brownian(0.00875, 0.25)};
    const DebtSchedule sched{0.25, 0.4, 40};
    SimOptions d12, d14;
    d12.bridge_depth = 12;
    d14.bridge_depth = 14;
    const auto a = estimate_gap_distribution(firm, sched, 30000, 999,
                                             GapConditioning::given_default(), d12);
    const auto b = estimate_gap_distribution(firm, sched, 30000, 999,
                                             GapConditioning::given_default(), d14);
    for (double q : {0.25, 0.5, 0.75}) {
        const double qa = a.quantile(q);
        const double qb = b.quantile(q);
        CHECK(std::fabs(qb - qa) < 0.005 * std::max(qa, qb));
    }
}

TEST_CASE("pathwise invariants hold on every defaulted outcome") {
    const DebtSchedule sched{0.5, 0.6, 10};
    const std::vector<LevyModel> models{
        LevyModel::brownian(-0.05, 0.3),
        LevyModel::jump_diffusion(-0.2, 0.15, {0.7, ExponentialJumps{2.0}}),
        LevyModel::alpha_stable(-0.05, {1.5, 0.15, 0.0}),
    };
    for (const auto& model : models) {
        SimOptions opts;
        opts.pure_jump_substeps = 64;
        const auto outcomes =
            simulate_outcomes({1.0, model}, sched, 2000, 31337, opts);
        for (const auto& o : outcomes) {
            if (!o.defaulted()) continue;
            CHECK(o.gap >= 0.0);
            CHECK(o.gap <= sched.n_interval * (1.0 + 1e-12));
            CHECK(o.tau_e <= o.tau_r);
            CHECK(o.tau_e >= o.tau_r - sched.n_interval);
            CHECK(o.value_at_default <= sched.barrier * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("default probabilities: guards and sub-probability") {
    const FirmValue firm{1.0, LevyModel::brownian(0.0, 0.25)};
    CHECK_THROWS_AS(
        estimate_default_probabilities({0.3, LevyModel::brownian(0.0, 0.25)},
                                       {0.25, 0.4, 4}, 10, 1, {}),
        BadStart);
    const auto est = estimate_default_probabilities(firm, {0.25, 0.4, 12}, 20000, 3, {});
    CHECK(est.p_default <= 1.0 + 1e-12);
    double total = 0.0;
    for (const auto& [k, u] : est.u.samples) total += u;
    CHECK(total == doctest::Approx(est.p_default));
}

TEST_CASE("lattice default probabilities match the exact ladder law") {
    const auto firm = lattice_firm();
    const double lambda = firm.model.jumps->intensity;
    const DebtSchedule sched{1.0, std::exp(-3.0), 6};
    const auto walk = lattice_walk_of(lambda, 30);

    const auto est = estimate_default_probabilities(firm, sched, 100000, 505, {});
    for (int k = 1; k <= 6; ++k) {
        const auto law = joint_first_passage_law(walk, 1.0, sched.barrier, k,
                                                 LadderConvention::StrictAscWeakDesc,
                                                 40 + 3 * k);
        const double u_dp = law.total();
        const double u_mc = est.u.samples[k - 1].second;
        const double se = est.std_err[k] + 1e-9;
        CHECK(std::fabs(u_mc - u_dp) < 3.0 * se);
    }
}

TEST_CASE("tau_e distribution identities") {
    const FirmValue firm{1.0, LevyModel::brownian(0.00875, 0.25)};
    const DebtSchedule sched{0.25, 0.4, 20};
    const auto dists = estimate_tau_e_distribution(firm, sched, 30000, 5, {});
    REQUIRE(dists.defaulted > 0);
    // E[tau_e] = E[tau_r] - E[gap] exactly on the sample
    CHECK(dists.tau_e.mean() ==
          doctest::Approx(dists.tau_r.mean() - dists.gap.mean()).epsilon(1e-12));
    const double horizon = sched.payment_time(sched.horizon_payments);
    for (const auto& [v, w] : dists.tau_e.samples) {
        CHECK(v >= 0.0);
        CHECK(v <= horizon);
    }
}

TEST_CASE("tau_e law equals the ladder-law convolution with the gap law") {
    const auto firm = lattice_firm();
    const DebtSchedule sched{1.0, std::exp(-3.0), 6};
    const auto walk = lattice_walk_of(firm.model.jumps->intensity, 30);

    // route A: direct tau_e samples
    const auto a = simulate_outcomes(firm, sched, 100000, 606, {});
    std::vector<double> tau_e_a;
    for (const auto& o : a) {
        if (o.defaulted()) tau_e_a.push_back(o.tau_e);
    }
    std::sort(tau_e_a.begin(), tau_e_a.end());

    // route B: exact u_k from the ladder DP, conditional gap laws from an
    // independent run
    const auto b = simulate_outcomes(firm, sched, 100000, 707, {});
    std::map<int, std::vector<double>> gaps_by_k;
    for (const auto& o : b) {
        if (o.defaulted()) gaps_by_k[o.payment_index].push_back(o.gap);
    }
    std::vector<double> u_dp(7, 0.0);
    double u_total = 0.0;
    for (int k = 1; k <= 6; ++k) {
        u_dp[k] = joint_first_passage_law(walk, 1.0, sched.barrier, k,
                                          LadderConvention::StrictAscWeakDesc,
                                          40 + 3 * k)
                      .total();
        u_total += u_dp[k];
    }

    const auto route_b_cdf = [&](double t) {
        double acc = 0.0;
        for (int k = 1; k <= 6; ++k) {
            const auto it = gaps_by_k.find(k);
            if (it == gaps_by_k.end()) continue;
            // tau_e <= t given tau_r = kN  <=>  gap >= kN - t
            const double cutoff = sched.payment_time(k) - t;
            std::size_t cnt = 0;
            for (double g : it->second) cnt += g >= cutoff;
            acc += u_dp[k] * static_cast<double>(cnt) /
                   static_cast<double>(it->second.size());
        }
        return acc / u_total;
    };

    const double n_a = static_cast<double>(tau_e_a.size());
    for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0}) {
        const double fa =
            static_cast<double>(std::upper_bound(tau_e_a.begin(), tau_e_a.end(), t) -
                                tau_e_a.begin()) /
            n_a;
        const double fb = route_b_cdf(t);
        const double se = 0.5 / std::sqrt(n_a) + 0.5 / std::sqrt(20000.0);
        CHECK(std::fabs(fa - fb) < 4.5 * se);
    }
}

TEST_CASE("gap conditioning variants") {
    const FirmValue firm{1.0, LevyModel::brownian(0.00875, 0.25)};
    const DebtSchedule sched{0.25, 0.4, 20};
    const auto outcomes = simulate_outcomes(firm, sched, 20000, 8, {});

    const auto uncond = gap_distribution_from(outcomes, GapConditioning::unconditional());
    const auto given = gap_distribution_from(outcomes, GapConditioning::given_default());
    std::int64_t defaulted = 0;
    for (const auto& o : outcomes) defaulted += o.defaulted();
    CHECK(uncond.total_weight() ==
          doctest::Approx(static_cast<double>(defaulted) / 20000.0).epsilon(1e-12));
    CHECK(given.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& [v, w] : given.samples) {
        CHECK(v >= 0.0);
        CHECK(v <= sched.n_interval);
    }

    const auto k1 = gap_distribution_from(outcomes, GapConditioning::given_tau_r(1));
    CHECK(k1.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(
        gap_distribution_from(outcomes, GapConditioning::given_tau_r(9999)),
        NoDefaults);
}

TEST_CASE("regression baseline: worked example presets") {
    // Example-1 parameters (sigma=0.25, mu=0.04, D=0.4, N=15/365) over a
    // ten-year horizon; frozen from a reference run of this configuration.
    {
        const FirmValue firm{1.0, LevyModel::brownian(0.00875, 0.25)};
        const DebtSchedule sched{15.0 / 365.0, 0.4, 243};
        const auto est = estimate_default_probabilities(firm, sched, 20000, 4242, {});
        CHECK(est.p_default == doctest::Approx(0.20070).epsilon(0.045)); // +-3 SE
    }
    // Example-2 parameters (N = 3 months, D = 0.1): defaults are rare.
    {
        const FirmValue firm{1.0, LevyModel::brownian(0.00875, 0.25)};
        const DebtSchedule sched{0.25, 0.1, 40};
        const auto outcomes = simulate_outcomes(firm, sched, 50000, 4242, {});
        std::int64_t defaulted = 0;
        double mean_gap = 0.0;
        for (const auto& o : outcomes) {
            if (o.defaulted()) {
                ++defaulted;
                mean_gap += o.gap;
            }
        }
        CHECK(defaulted > 0);
        CHECK(defaulted < 500);
        mean_gap /= static_cast<double>(defaulted);
        CHECK(mean_gap > 0.0);
        CHECK(mean_gap < 0.25);
    }
}
