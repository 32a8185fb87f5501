#include "mobgap/stats.hpp"

#include "mobgap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mobgap {

WeightedMean weighted_mean(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) {
        throw ValidationError("values and weights must have equal length");
    }
    if (values.empty()) {
        throw ValidationError("weighted_mean needs at least one value");
    }
    double sum_w = 0.0;
    double sum_wv = 0.0;
    double sum_w2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] < 0.0) {
            throw ValidationError("negative weight at index " + std::to_string(i));
        }
        sum_w += weights[i];
        sum_w2 += weights[i] * weights[i];
        sum_wv += weights[i] * values[i];
    }
    if (sum_w <= 0.0) {
        throw ValidationError("weights sum to zero");
    }

    WeightedMean out;
    out.n = values.size();
    out.mean = sum_wv / sum_w;
    out.n_effective = sum_w * sum_w / sum_w2;

    double ss = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - out.mean;
        ss += weights[i] * d * d;
    }
    if (out.n_effective > 1.0) {
        // Reliability-weight unbiased variance: ss / (sum_w - sum_w2/sum_w),
        // then divided by the effective size.
        const double sample_variance = ss / (sum_w - sum_w2 / sum_w);
        out.variance_of_mean = sample_variance / out.n_effective;
    } else {
        out.variance_of_mean = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

namespace {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            break;
        }
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

} // namespace

double student_t_sf(double t, double df) {
    if (!(df > 0.0)) {
        throw ValidationError("degrees of freedom must be positive");
    }
    if (std::isnan(t)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

double welch_p_value(double mean_a, double variance_of_mean_a, double n_effective_a, double mean_b,
                     double variance_of_mean_b, double n_effective_b) {
    if (variance_of_mean_a < 0.0 || variance_of_mean_b < 0.0) {
        throw ValidationError("variance of mean must be non-negative");
    }
    const double v = variance_of_mean_a + variance_of_mean_b;
    if (v == 0.0) {
        return mean_a == mean_b ? 1.0 : 0.0;
    }
    if (!std::isfinite(v)) {
        throw ValidationError("welch test needs finite variances");
    }
    if (!(n_effective_a > 1.0) || !(n_effective_b > 1.0)) {
        throw ValidationError("welch test needs effective sample sizes above 1 on both sides");
    }
    const double t = (mean_a - mean_b) / std::sqrt(v);
    const double df = v * v /
                      (variance_of_mean_a * variance_of_mean_a / (n_effective_a - 1.0) +
                       variance_of_mean_b * variance_of_mean_b / (n_effective_b - 1.0));
    return 2.0 * student_t_sf(std::fabs(t), df);
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("median of empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double weighted_median(std::vector<std::pair<double, double>> value_weight) {
    if (value_weight.empty()) {
        throw ValidationError("median of empty set");
    }
    double total = 0.0;
    for (const auto& [v, w] : value_weight) {
        if (w < 0.0) {
            throw ValidationError("negative weight in weighted median");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw ValidationError("weights sum to zero");
    }
    std::sort(value_weight.begin(), value_weight.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < value_weight.size(); ++i) {
        acc += value_weight[i].second;
        if (acc > 0.5 * total) {
            return value_weight[i].first;
        }
        if (acc == 0.5 * total) {
            // Exactly at the half-weight boundary: average with the next
            // positive-weight value, matching the even-count convention.
            for (std::size_t j = i + 1; j < value_weight.size(); ++j) {
                if (value_weight[j].second > 0.0) {
                    return 0.5 * (value_weight[i].first + value_weight[j].first);
                }
            }
            return value_weight[i].first;
        }
    }
    return value_weight.back().first;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) {
        throw ValidationError("labelings must have equal length");
    }
    if (a.empty()) {
        throw ValidationError("adjusted_rand_index needs at least one record");
    }
    std::map<std::pair<std::size_t, std::size_t>, double> joint;
    std::map<std::size_t, double> rows;
    std::map<std::size_t, double> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    const auto choose2 = [](double m) { return 0.5 * m * (m - 1.0); };
    double sum_joint = 0.0;
    for (const auto& [key, m] : joint) {
        sum_joint += choose2(m);
    }
    double sum_rows = 0.0;
    for (const auto& [key, m] : rows) {
        sum_rows += choose2(m);
    }
    double sum_cols = 0.0;
    for (const auto& [key, m] : cols) {
        sum_cols += choose2(m);
    }
    const double total = choose2(static_cast<double>(a.size()));
    const double expected = sum_rows * sum_cols / total;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) {
        return 1.0; // both labelings fully determined (all-singletons or single cluster)
    }
    return (sum_joint - expected) / (max_index - expected);
}

} // namespace mobgap
