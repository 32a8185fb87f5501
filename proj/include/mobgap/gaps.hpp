#pragma once

#include "mobgap/income.hpp"
#include "mobgap/stats.hpp"
#include "mobgap/survey.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mobgap {

enum class MetricName { daily_person_trips, daily_pmt, trip_length, trip_duration };

const char* to_string(MetricName m);
const char* metric_unit(MetricName m);

// Per-day metrics average over persons with person weights; per-trip metrics
// average over trips with trip weights.
bool is_per_trip_metric(MetricName m);

struct MetricSpec {
    MetricName name = MetricName::daily_person_trips;
    // Mode codes dropped from the metric. Only the per-trip metrics accept a
    // non-empty set (the per-day metrics keep every trip).
    std::set<std::string> exclude_modes;
};

// The four mobility metrics, with the exclusion set applied to trip_length
// and trip_duration.
std::vector<MetricSpec> default_metrics(const std::set<std::string>& exclude_modes);

enum class Weighting { weighted, unweighted };

// One side (income class) of a comparison group.
struct GroupStat {
    std::string group_label; // cluster label or "all"
    IncomeClass income_class = IncomeClass::low_income;
    std::size_t n_unweighted = 0;
    double n_effective = 0.0;
    double mean = 0.0;
    double variance_of_mean = 0.0;
};

// Welch two-sample test on summary statistics with Kish effective sizes.
double welch_test(const GroupStat& a, const GroupStat& b);

// Value of a per-day metric for one person: trip count or total miles over
// the travel day. Persons without trips contribute zero.
double person_day_metric(const SurveyStore& store, std::size_t person_idx, MetricName metric);

// (value, trip weight) per trip whose mode survives the exclusion set.
// Requires a per-trip metric.
std::vector<std::pair<double, double>> per_trip_metric(const SurveyStore& store,
                                                       const MetricSpec& metric);

// Difference row for one metric and group; difference and p_value are absent
// when a side has no members ("insufficient data") or the test preconditions
// fail.
struct GapEntry {
    MetricName metric = MetricName::daily_person_trips;
    std::string group_label;
    GroupStat low;
    GroupStat not_low;
    std::optional<double> difference; // not_low.mean - low.mean
    std::optional<double> p_value;
    bool significant_5pct = false;
};

using GapReport = std::vector<GapEntry>;

// Every metric crossed with "all" plus each cluster, in that order.
// income_classes and assignments are per-household, aligned with the store.
GapReport compute_gaps(const SurveyStore& store, const std::vector<IncomeClass>& income_classes,
                       const std::vector<std::size_t>& assignments, std::size_t cluster_count,
                       const std::vector<MetricSpec>& metrics, Weighting weighting);

// Per-cluster descriptive table (numeric medians, categorical level shares,
// household share, low-income share), household-weighted and unweighted.
struct LevelShare {
    std::string level;
    double pct_unweighted = 0.0;
    double pct_weighted = 0.0;
};

struct VariableShare {
    std::string variable;
    std::vector<LevelShare> levels;
};

struct NumericSummary {
    std::string variable;
    double median_unweighted = 0.0;
    double median_weighted = 0.0;
};

struct ClusterRow {
    std::size_t cluster = 0; // 0-based; labeled cluster_<n+1> in outputs
    std::size_t n_households = 0;
    double weight_sum = 0.0;
    double share_pct_unweighted = 0.0;
    double share_pct_weighted = 0.0;
    double low_income_pct_unweighted = 0.0;
    double low_income_pct_weighted = 0.0;
    std::vector<NumericSummary> numerics;
    std::vector<VariableShare> categoricals;
};

using ClusterSummaryTable = std::vector<ClusterRow>;

ClusterSummaryTable cluster_summary(const SurveyStore& store,
                                    const std::vector<HouseholdFeatures>& features,
                                    const std::vector<std::size_t>& assignments,
                                    std::size_t cluster_count,
                                    const std::vector<IncomeClass>& income_classes);

std::string cluster_label(std::size_t cluster_index);

// gaps.csv: metric,group,n_low,n_notlow,mean_low,mean_notlow,difference,p_value,significant
std::string gaps_to_csv(const GapReport& report);
// cluster_summary.csv: cluster,variable,level,unweighted,weighted
std::string cluster_summary_to_csv(const ClusterSummaryTable& table);
// JSON bundle mirroring both tables.
std::string report_bundle_to_json(const GapReport& report, const ClusterSummaryTable& table,
                                  Weighting weighting);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace mobgap
