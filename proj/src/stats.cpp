#include "defaultgap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace defaultgap {

double MeanVar::std_err() const {
    return n > 1 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
}

MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar out;
    out.n = xs.size();
    if (xs.empty()) return out;
    double s = 0.0;
    for (double x : xs) s += x;
    out.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            const double d = x - out.mean;
            ss += d * d;
        }
        out.variance = ss / static_cast<double>(xs.size() - 1);
    }
    return out;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("ks_statistic_two_sample: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
    }
    return d;
}

double chi2_pvalue(double statistic, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("chi2_pvalue: dof must be > 0");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

Histogram Histogram::build(const std::vector<double>& samples, double lo,
                           double hi, std::size_t bins, std::size_t total_count) {
    if (!(hi > lo) || bins == 0) throw std::invalid_argument("Histogram: bad range");
    Histogram h;
    h.total = total_count;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0);
    const double w = (hi - lo) / static_cast<double>(bins);
    for (double x : samples) {
        if (x < lo || x > hi) continue;
        auto idx = static_cast<std::size_t>((x - lo) / w);
        if (idx >= bins) idx = bins - 1; // x == hi
        ++h.counts[idx];
    }
    h.mass.resize(bins);
    h.std_err.resize(bins);
    const double n = static_cast<double>(total_count);
    for (std::size_t i = 0; i < bins; ++i) {
        const double p = n > 0 ? static_cast<double>(h.counts[i]) / n : 0.0;
        h.mass[i] = p;
        h.std_err[i] = n > 0 ? std::sqrt(p * (1.0 - p) / n) : 0.0;
    }
    return h;
}

std::string Histogram::to_csv() const {
    std::string out = "bin_left,bin_right,mass,std_err\n";
    char buf[160];
    for (std::size_t i = 0; i < mass.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", edges[i],
                      edges[i + 1], mass[i], std_err[i]);
        out += buf;
    }
    return out;
}

double chi2_gof_pvalue(const std::vector<std::size_t>& observed,
                       const std::vector<double>& expected_probs,
                       std::size_t total, double min_expected,
                       int extra_constraints) {
    if (observed.size() != expected_probs.size() || observed.empty()) {
        throw std::invalid_argument("chi2_gof_pvalue: size mismatch");
    }
    const double n = static_cast<double>(total);
    // Pool sparse cells left to right so every effective cell has enough
    // expected mass for the chi-squared approximation.
    std::vector<double> obs_pooled, exp_pooled;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += static_cast<double>(observed[i]);
        e_acc += expected_probs[i] * n;
        if (e_acc >= min_expected) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp_pooled.empty()) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
        } else {
            obs_pooled.back() += o_acc;
            exp_pooled.back() += e_acc;
        }
    }
    if (exp_pooled.size() < 2) return 1.0;
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
        if (exp_pooled[i] <= 0.0) continue;
        const double d = obs_pooled[i] - exp_pooled[i];
        stat += d * d / exp_pooled[i];
    }
    const double dof =
        static_cast<double>(exp_pooled.size()) - 1.0 - extra_constraints;
    if (dof <= 0.0) return 1.0;
    return chi2_pvalue(stat, dof);
}

double chi2_homogeneity_pvalue(const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b,
                               double min_expected) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("chi2_homogeneity_pvalue: size mismatch");
    }
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("chi2_homogeneity_pvalue: empty sample");
    }
    // pool bins until both expected counts clear the threshold
    std::vector<std::pair<double, double>> cells;
    double ca = 0.0, cb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca += static_cast<double>(a[i]);
        cb += static_cast<double>(b[i]);
        const double tot = ca + cb;
        if (tot * na / (na + nb) >= min_expected && tot * nb / (na + nb) >= min_expected) {
            cells.emplace_back(ca, cb);
            ca = cb = 0.0;
        }
    }
    if ((ca > 0.0 || cb > 0.0) && !cells.empty()) {
        cells.back().first += ca;
        cells.back().second += cb;
    }
    if (cells.size() < 2) return 1.0;
    double stat = 0.0;
    for (const auto& [oa, ob] : cells) {
        const double tot = oa + ob;
        const double ea = tot * na / (na + nb);
        const double eb = tot * nb / (na + nb);
        stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    return chi2_pvalue(stat, static_cast<double>(cells.size()) - 1.0);
}

} // namespace defaultgap
