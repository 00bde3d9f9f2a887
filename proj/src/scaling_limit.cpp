#include "defaultgap/scaling_limit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "defaultgap/errors.hpp"
#include "defaultgap/parallel.hpp"
#include "defaultgap/stats.hpp"

namespace defaultgap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_base(const BaseReturns& base) {
    if (const auto* d = std::get_if<DiscreteReturns>(&base)) {
        if (d->values.empty() || d->values.size() != d->probs.size()) {
            throw std::invalid_argument("discrete returns: values/probs mismatch");
        }
        double total = 0.0;
        for (double p : d->probs) {
            if (!(p >= 0.0)) throw std::invalid_argument("discrete returns: negative prob");
            total += p;
        }
        if (std::fabs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("discrete returns: probs must sum to 1");
        }
    } else if (const auto* s = std::get_if<StableReturns>(&base)) {
        if (!(s->alpha > 0.0 && s->alpha < 2.0)) {
            throw std::invalid_argument("stable returns: alpha out of (0,2)");
        }
        if (!(s->scale > 0.0)) throw std::invalid_argument("stable returns: scale <= 0");
        if (!(std::fabs(s->beta) <= 1.0)) {
            throw std::invalid_argument("stable returns: beta out of [-1,1]");
        }
    }
}

} // namespace

double zeta_factor(const RescaledModel& model) {
    if (model.n < 1) throw std::invalid_argument("rescale factor n must be >= 1");
    if (model.zeta == ZetaRule::SqrtN) return std::sqrt(static_cast<double>(model.n));
    const auto* s = std::get_if<StableReturns>(&model.base);
    if (!s) {
        throw std::invalid_argument("PowerOneOverAlpha rescaling needs stable returns");
    }
    return std::pow(static_cast<double>(model.n), 1.0 / s->alpha);
}

double log_mgf(const BaseReturns& base, double s) {
    check_base(base);
    return std::visit(
        [s](const auto& b) -> double {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, GaussianReturns>) {
                return b.mean * s + 0.5 * b.sd * b.sd * s * s;
            } else if constexpr (std::is_same_v<T, DiscreteReturns>) {
                double acc = 0.0;
                for (std::size_t i = 0; i < b.values.size(); ++i) {
                    acc += b.probs[i] * std::exp(s * b.values[i]);
                }
                return std::log(acc);
            } else {
                throw NoExponentialMoment("stable returns have no exponential moment");
            }
        },
        base);
}

double sample_base_return(const BaseReturns& base, RngStream& rng) {
    return std::visit(
        [&rng](const auto& b) -> double {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, GaussianReturns>) {
                return b.mean + b.sd * rng.normal();
            } else if constexpr (std::is_same_v<T, DiscreteReturns>) {
                const double u = rng.uniform();
                double cum = 0.0;
                for (std::size_t i = 0; i < b.values.size(); ++i) {
                    cum += b.probs[i];
                    if (u <= cum) return b.values[i];
                }
                return b.values.back();
            } else {
                return b.scale * rng.stable(b.alpha, b.beta);
            }
        },
        base);
}

double compensator(const RescaledModel& model, double t) {
    check_base(model.base);
    if (t < 0.0) throw std::invalid_argument("compensator: t < 0");
    const double zeta = zeta_factor(model);
    const auto steps = static_cast<std::int64_t>(
        std::floor(model.n * t / model.n_interval + 1e-9));
    if (steps == 0) return 0.0;
    return static_cast<double>(steps) * log_mgf(model.base, 1.0 / zeta);
}

double hitting_density_gbm(double x, double s, double sigma, double n_interval,
                           double barrier) {
    if (!(x >= barrier) || !(barrier > 0.0) || !(sigma > 0.0) || !(n_interval > 0.0)) {
        throw OutOfDomain("hitting_density_gbm: needs x >= barrier > 0, sigma > 0");
    }
    if (!(s > 0.0)) throw OutOfDomain("hitting_density_gbm: s must be > 0");
    const double sv = sigma / std::sqrt(n_interval);
    const double ell = std::log(barrier / x); // <= 0
    if (ell == 0.0) return 0.0;
    const double nu = -0.5 * sv * sv;
    const double z = (ell - nu * s) / (sv * std::sqrt(s));
    return std::fabs(ell) / (sv * std::sqrt(2.0 * kPi * s * s * s)) *
           std::exp(-0.5 * z * z);
}

double hitting_cdf_gbm(double x, double t, double sigma, double n_interval,
                       double barrier) {
    if (!(x >= barrier) || !(barrier > 0.0) || !(sigma > 0.0) || !(n_interval > 0.0)) {
        throw OutOfDomain("hitting_cdf_gbm: needs x >= barrier > 0, sigma > 0");
    }
    if (t <= 0.0) return x == barrier ? 1.0 : 0.0;
    const double sv = sigma / std::sqrt(n_interval);
    const double ell = std::log(barrier / x);
    if (ell == 0.0) return 1.0;
    const double nu = -0.5 * sv * sv;
    const double rt = sv * std::sqrt(t);
    return normal_cdf((ell - nu * t) / rt) +
           std::exp(2.0 * nu * ell / (sv * sv)) * normal_cdf((ell + nu * t) / rt);
}

WindowEstimate default_window_probability(const RescaledModel& model, double s0,
                                          double barrier, double t1, double t2,
                                          std::int64_t n_paths,
                                          std::uint64_t seed, int threads) {
    check_base(model.base);
    if (!(t2 >= t1 && t1 >= 0.0)) throw std::invalid_argument("window: need T2 >= T1 >= 0");
    if (!(s0 > barrier)) throw BadStart("window: S_0 <= D");
    if (n_paths < 1) throw std::invalid_argument("window: n_paths >= 1");

    const double h = model.n_interval / model.n;
    const auto m1 = static_cast<std::int64_t>(std::floor(t1 / h + 1e-9));
    const auto m2 = static_cast<std::int64_t>(std::floor(t2 / h + 1e-9));
    if (m2 == 0 || barrier <= 0.0) return {0.0, 0.0, n_paths};

    const double zeta = zeta_factor(model);
    double step_drift = 0.0;
    if (!std::holds_alternative<StableReturns>(model.base)) {
        step_drift = -log_mgf(model.base, 1.0 / zeta);
    }
    const double level = std::log(barrier / s0);

    std::vector<char> hits(n_paths, 0);
    parallel_for(n_paths, threads, [&](std::int64_t i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        double x = 0.0;
        for (std::int64_t j = 1; j <= m2; ++j) {
            x += sample_base_return(model.base, rng) / zeta + step_drift;
            if (x <= level) {
                hits[i] = j > m1 ? 1 : 0;
                break;
            }
        }
    });
    double count = 0.0;
    for (char c : hits) count += c;
    const double p = count / static_cast<double>(n_paths);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_paths)), n_paths};
}

SigmaFEstimate estimate_sigma_f(const ReturnSeries& series, int lag_cutoff,
                                bool centered) {
    const auto& y = series.values;
    if (lag_cutoff < 0) throw std::invalid_argument("lag_cutoff must be >= 0");
    if (static_cast<int>(y.size()) <= lag_cutoff + 1 || y.size() < 2) {
        throw SeriesTooShort("estimate_sigma_f: series too short for the lag cutoff");
    }
    if (!(series.n_interval > 0.0)) throw std::invalid_argument("n_interval must be > 0");

    auto estimator = [&](const std::vector<double>& v) {
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double m2 = 0.0;
        for (double x : v) m2 += centered ? (x - mean) * (x - mean) : x * x;
        m2 /= n;
        double acc = m2;
        for (int k = 1; k <= lag_cutoff; ++k) {
            if (static_cast<std::size_t>(k) >= v.size()) break;
            double cov = 0.0;
            for (std::size_t i = 0; i + k < v.size(); ++i) {
                cov += (v[i] - mean) * (v[i + k] - mean);
            }
            acc += 2.0 * cov / n;
        }
        return std::sqrt(std::max(0.0, acc / series.n_interval));
    };

    SigmaFEstimate est;
    est.sigma_f = estimator(y);

    // delete-a-block jackknife
    const int blocks = std::min<int>(10, static_cast<int>(y.size()) / (lag_cutoff + 2));
    if (blocks >= 2) {
        std::vector<double> theta(blocks);
        const std::size_t blen = y.size() / blocks;
        for (int b = 0; b < blocks; ++b) {
            std::vector<double> reduced;
            reduced.reserve(y.size() - blen);
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (i >= b * blen && i < (b + 1) * blen) continue;
                reduced.push_back(y[i]);
            }
            theta[b] = estimator(reduced);
        }
        double tbar = 0.0;
        for (double t : theta) tbar += t;
        tbar /= blocks;
        double ss = 0.0;
        for (double t : theta) ss += (t - tbar) * (t - tbar);
        est.std_err = std::sqrt(ss * (blocks - 1.0) / blocks);
    }
    return est;
}

HillEstimate estimate_tail_index(const ReturnSeries& series, int k_order) {
    const auto& y = series.values;
    if (k_order < 1 || static_cast<std::size_t>(k_order) >= y.size()) {
        throw SeriesTooShort("estimate_tail_index: need 1 <= k < series length");
    }
    std::vector<double> mags(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) mags[i] = std::fabs(y[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    const double ref = mags[k_order]; // (k+1)-th largest
    if (!(ref > 0.0)) {
        throw std::invalid_argument("estimate_tail_index: reference order statistic is 0");
    }
    double acc = 0.0;
    for (int i = 0; i < k_order; ++i) acc += std::log(mags[i] / ref);
    if (!(acc > 0.0)) {
        throw std::invalid_argument("estimate_tail_index: degenerate top order statistics");
    }
    HillEstimate est;
    est.k = k_order;
    est.alpha = k_order / acc;
    est.std_err = est.alpha / std::sqrt(static_cast<double>(k_order));
    return est;
}

double stable_cdf(double x, double alpha, double scale) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha out of (0,2)");
    if (!(scale > 0.0)) throw std::invalid_argument("scale must be > 0");
    const double z = x / scale;
    if (z == 0.0) return 0.5;
    if (z < 0.0) return 1.0 - stable_cdf(-x, alpha, scale);

    // Far tail: Bergstrom series 1 - F(z) = (1/pi) sum_k (-1)^{k-1}
    // Gamma(k alpha + 1) sin(k pi alpha / 2) z^{-k alpha} / k!.
    if (z >= std::max(30.0, std::pow(20.0, 1.0 / alpha))) {
        double tail = 0.0;
        double factorial = 1.0;
        for (int k = 1; k <= 4; ++k) {
            factorial *= k;
            tail += (k % 2 == 1 ? 1.0 : -1.0) * std::tgamma(k * alpha + 1.0) *
                    std::sin(k * kPi * alpha / 2.0) * std::pow(z, -k * alpha) /
                    factorial;
        }
        return 1.0 - tail / kPi;
    }

    // F(z) = 1/2 + (1/pi) int_0^inf sin(z t) e^{-t^alpha} / t dt, integrated
    // piecewise over half-oscillations with a fixed Gauss rule.
    const double theta_max = std::pow(37.0, 1.0 / alpha);
    const double seg = std::min(kPi / std::max(z, 1.0), theta_max / 8.0);
    const auto n_seg = static_cast<std::int64_t>(std::ceil(theta_max / seg));
    double acc = 0.0;
    auto integrand = [z, alpha](double t) {
        if (t == 0.0) return z;
        return std::sin(z * t) * std::exp(-std::pow(t, alpha)) / t;
    };
    for (std::int64_t i = 0; i < n_seg; ++i) {
        const double a = theta_max * static_cast<double>(i) / static_cast<double>(n_seg);
        const double b = theta_max * static_cast<double>(i + 1) / static_cast<double>(n_seg);
        acc += boost::math::quadrature::gauss<double, 31>::integrate(integrand, a, b);
    }
    const double f = 0.5 + acc / kPi;
    return std::clamp(f, 0.0, 1.0);
}

double stable_quantile(double p, double alpha, double scale) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -stable_quantile(1.0 - p, alpha, scale);
    double lo = 0.0, hi = scale;
    while (stable_cdf(hi, alpha, scale) < p) {
        hi *= 2.0;
        if (hi > 1e9 * scale) throw QuadratureFailure("stable_quantile: no bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (stable_cdf(mid, alpha, scale) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-10 * std::max(1.0, std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

StableLimitReport stable_limit_check(double alpha, double scale,
                                     const std::vector<int>& n_grid,
                                     std::int64_t n_paths, std::uint64_t seed,
                                     double perturb_half_width, int threads) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::invalid_argument("stable_limit_check: alpha out of (0,2)");
    }
    if (!(scale > 0.0)) throw std::invalid_argument("stable_limit_check: scale <= 0");
    StableLimitReport report;
    report.n_grid = n_grid;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const int n = n_grid[gi];
        if (n < 1) throw std::invalid_argument("stable_limit_check: n >= 1");
        const double norm = std::pow(static_cast<double>(n), 1.0 / alpha);
        std::vector<double> samples(n_paths);
        parallel_for(n_paths, threads, [&](std::int64_t i) {
            RngStream rng(derive_seed(seed, gi), static_cast<std::uint64_t>(i));
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                acc += scale * rng.stable(alpha, 0.0);
                if (perturb_half_width > 0.0) {
                    acc += perturb_half_width * (2.0 * rng.uniform() - 1.0);
                }
            }
            samples[i] = acc / norm;
        });
        report.ks.push_back(ks_statistic(
            std::move(samples),
            [alpha, scale](double x) { return stable_cdf(x, alpha, scale); }));
    }
    report.decreasing = true;
    for (std::size_t i = 1; i < report.ks.size(); ++i) {
        if (!(report.ks[i] < report.ks[i - 1])) report.decreasing = false;
    }
    return report;
}

} // namespace defaultgap
