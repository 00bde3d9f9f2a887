#pragma once

#include <functional>
#include <string>
#include <vector>

namespace defaultgap {

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0; // unbiased (n-1 denominator)
    std::size_t n = 0;
    double std_err() const; // of the mean
};

MeanVar mean_var(const std::vector<double>& xs);

// One-sample Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)|.
// Samples need not be sorted.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Two-sample KS statistic.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

// Upper tail probability of a chi-squared variable with dof degrees of freedom.
double chi2_pvalue(double statistic, double dof);

// Fixed-width histogram with per-bin standard errors, for CSV export and
// goodness-of-fit checks. Mass is normalized by the total count supplied to
// `build` (which may exceed the number of samples inside the range, so the
// histogram can represent a sub-probability law).
struct Histogram {
    std::vector<double> edges;   // size bins+1
    std::vector<double> mass;    // size bins
    std::vector<double> std_err; // binomial SE of each mass estimate
    std::vector<std::size_t> counts;
    std::size_t total = 0;

    static Histogram build(const std::vector<double>& samples, double lo,
                           double hi, std::size_t bins, std::size_t total_count);

    std::string to_csv() const; // columns: bin_left,bin_right,mass,std_err
};

// Pearson chi-squared p-value of observed counts against expected
// probabilities; bins with expected count below min_expected are pooled with
// their right neighbour. dof = (#effective bins) - 1 - extra_constraints.
double chi2_gof_pvalue(const std::vector<std::size_t>& observed,
                       const std::vector<double>& expected_probs,
                       std::size_t total, double min_expected = 5.0,
                       int extra_constraints = 0);

// Two-sample chi-squared homogeneity test: were the two count vectors drawn
// from the same law? Sparse bins are pooled jointly.
double chi2_homogeneity_pvalue(const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b,
                               double min_expected = 5.0);

} // namespace defaultgap
