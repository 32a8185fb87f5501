#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mobgap {

struct WeightedMean {
    double mean = 0.0;
    // Unbiased (reliability-weight) variance of the mean estimate; NaN when
    // the Kish effective size does not exceed 1.
    double variance_of_mean = 0.0;
    double n_effective = 0.0; // Kish: (sum w)^2 / sum w^2
    std::size_t n = 0;
};

// Weighted mean with Kish effective sample size. Weights must be
// non-negative with a positive sum. Under uniform weights this reduces to the
// textbook sample mean with variance s^2/n.
WeightedMean weighted_mean(std::span<const double> values, std::span<const double> weights);

// Upper-tail probability P(T > t) for Student's t with df > 0 degrees of
// freedom, via the regularized incomplete beta function.
double student_t_sf(double t, double df);

// Two-sided Welch p-value from summary statistics, with Welch-Satterthwaite
// degrees of freedom computed on effective sample sizes. Zero combined
// variance degenerates to p = 1 for equal means and p = 0 otherwise.
double welch_p_value(double mean_a, double variance_of_mean_a, double n_effective_a, double mean_b,
                     double variance_of_mean_b, double n_effective_b);

// Median; an even count averages the two middle values. Input is copied.
double median(std::vector<double> values);

// Weight-cumulative median consistent with the unweighted convention under
// unit weights.
double weighted_median(std::vector<std::pair<double, double>> value_weight);

// Adjusted Rand index between two labelings of the same records.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

} // namespace mobgap
