#include "mobgap/gaps.hpp"

#include "mobgap/csv.hpp"
#include "mobgap/errors.hpp"
#include "mobgap/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace mobgap {

const char* to_string(MetricName m) {
    switch (m) {
    case MetricName::daily_person_trips:
        return "daily_person_trips";
    case MetricName::daily_pmt:
        return "daily_pmt";
    case MetricName::trip_length:
        return "trip_length";
    case MetricName::trip_duration:
        return "trip_duration";
    }
    return "?";
}

const char* metric_unit(MetricName m) {
    switch (m) {
    case MetricName::daily_person_trips:
        return "trips/person-day";
    case MetricName::daily_pmt:
        return "miles/person-day";
    case MetricName::trip_length:
        return "miles/trip";
    case MetricName::trip_duration:
        return "minutes/trip";
    }
    return "?";
}

bool is_per_trip_metric(MetricName m) {
    return m == MetricName::trip_length || m == MetricName::trip_duration;
}

std::vector<MetricSpec> default_metrics(const std::set<std::string>& exclude_modes) {
    return {
        MetricSpec{MetricName::daily_person_trips, {}},
        MetricSpec{MetricName::daily_pmt, {}},
        MetricSpec{MetricName::trip_length, exclude_modes},
        MetricSpec{MetricName::trip_duration, exclude_modes},
    };
}

double welch_test(const GroupStat& a, const GroupStat& b) {
    return welch_p_value(a.mean, a.variance_of_mean, a.n_effective, b.mean, b.variance_of_mean,
                         b.n_effective);
}

double person_day_metric(const SurveyStore& store, std::size_t person_idx, MetricName metric) {
    if (person_idx >= store.persons.size()) {
        throw ValidationError("person index out of range");
    }
    const auto& trip_idxs = store.trips_of_person[person_idx];
    switch (metric) {
    case MetricName::daily_person_trips:
        return static_cast<double>(trip_idxs.size());
    case MetricName::daily_pmt: {
        double miles = 0.0;
        for (const std::size_t t : trip_idxs) {
            miles += store.trips[t].distance_miles;
        }
        return miles;
    }
    case MetricName::trip_length:
    case MetricName::trip_duration:
        break;
    }
    throw ValidationError("person_day_metric requires a per-day metric");
}

std::vector<std::pair<double, double>> per_trip_metric(const SurveyStore& store,
                                                       const MetricSpec& metric) {
    if (!is_per_trip_metric(metric.name)) {
        throw ValidationError("per_trip_metric requires trip_length or trip_duration");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(store.trips.size());
    for (const auto& trip : store.trips) {
        if (metric.exclude_modes.count(trip.mode_code) > 0) {
            continue;
        }
        const double value = metric.name == MetricName::trip_length ? trip.distance_miles
                                                                    : trip.duration_minutes;
        out.emplace_back(value, trip.trip_weight);
    }
    return out;
}

namespace {

GroupStat make_group_stat(const std::string& label, IncomeClass cls, const std::vector<double>& values,
                          const std::vector<double>& weights) {
    GroupStat stat;
    stat.group_label = label;
    stat.income_class = cls;
    stat.n_unweighted = values.size();
    if (values.empty()) {
        stat.variance_of_mean = std::numeric_limits<double>::quiet_NaN();
        return stat;
    }
    const WeightedMean wm = weighted_mean(values, weights);
    stat.n_effective = wm.n_effective;
    stat.mean = wm.mean;
    stat.variance_of_mean = wm.variance_of_mean;
    return stat;
}

// Group selector: cluster index, or "all" when absent.
using GroupFilter = std::optional<std::size_t>;

GapEntry compute_entry(const SurveyStore& store, const std::vector<IncomeClass>& income_classes,
                       const std::vector<std::size_t>& assignments, const MetricSpec& metric,
                       const GroupFilter& group, const std::string& label, Weighting weighting) {
    std::vector<double> values[2];
    std::vector<double> weights[2];

    const auto side_of = [&](std::size_t household_idx) -> int {
        if (group.has_value() && assignments[household_idx] != *group) {
            return -1;
        }
        return income_classes[household_idx] == IncomeClass::low_income ? 0 : 1;
    };

    if (is_per_trip_metric(metric.name)) {
        for (const auto& trip : store.trips) {
            if (metric.exclude_modes.count(trip.mode_code) > 0) {
                continue;
            }
            const int side = side_of(store.household_index(trip.household_id));
            if (side < 0) {
                continue;
            }
            values[side].push_back(metric.name == MetricName::trip_length ? trip.distance_miles
                                                                          : trip.duration_minutes);
            weights[side].push_back(weighting == Weighting::weighted ? trip.trip_weight : 1.0);
        }
    } else {
        if (!metric.exclude_modes.empty()) {
            throw ValidationError("per-day metrics do not accept mode exclusions");
        }
        for (std::size_t h = 0; h < store.households.size(); ++h) {
            const int side = side_of(h);
            if (side < 0) {
                continue;
            }
            for (const std::size_t p : store.persons_of_household[h]) {
                values[side].push_back(person_day_metric(store, p, metric.name));
                weights[side].push_back(weighting == Weighting::weighted ? store.persons[p].person_weight
                                                                         : 1.0);
            }
        }
    }

    GapEntry entry;
    entry.metric = metric.name;
    entry.group_label = label;
    entry.low = make_group_stat(label, IncomeClass::low_income, values[0], weights[0]);
    entry.not_low = make_group_stat(label, IncomeClass::not_low_income, values[1], weights[1]);

    // A side with no members means "insufficient data": no difference at all,
    // never a zero.
    if (entry.low.n_unweighted == 0 || entry.not_low.n_unweighted == 0) {
        return entry;
    }
    entry.difference = entry.not_low.mean - entry.low.mean;

    const bool testable = entry.low.n_effective > 1.0 && entry.not_low.n_effective > 1.0 &&
                          std::isfinite(entry.low.variance_of_mean) &&
                          std::isfinite(entry.not_low.variance_of_mean);
    const bool degenerate = entry.low.variance_of_mean + entry.not_low.variance_of_mean == 0.0;
    if (testable || degenerate) {
        entry.p_value = welch_test(entry.not_low, entry.low);
        entry.significant_5pct = *entry.p_value < 0.05;
    }
    return entry;
}

} // namespace

GapReport compute_gaps(const SurveyStore& store, const std::vector<IncomeClass>& income_classes,
                       const std::vector<std::size_t>& assignments, std::size_t cluster_count,
                       const std::vector<MetricSpec>& metrics, Weighting weighting) {
    if (income_classes.size() != store.households.size() ||
        assignments.size() != store.households.size()) {
        throw ValidationError("income classes and assignments must cover every household");
    }
    for (const std::size_t a : assignments) {
        if (a >= cluster_count) {
            throw ValidationError("cluster assignment out of range");
        }
    }

    GapReport report;
    report.reserve(metrics.size() * (cluster_count + 1));
    for (const auto& metric : metrics) {
        report.push_back(compute_entry(store, income_classes, assignments, metric, std::nullopt, "all",
                                       weighting));
        for (std::size_t c = 0; c < cluster_count; ++c) {
            report.push_back(compute_entry(store, income_classes, assignments, metric, c,
                                           cluster_label(c), weighting));
        }
    }
    return report;
}

std::string cluster_label(std::size_t cluster_index) {
    return "cluster_" + std::to_string(cluster_index + 1);
}

ClusterSummaryTable cluster_summary(const SurveyStore& store,
                                    const std::vector<HouseholdFeatures>& features,
                                    const std::vector<std::size_t>& assignments,
                                    std::size_t cluster_count,
                                    const std::vector<IncomeClass>& income_classes) {
    const std::size_t n = store.households.size();
    if (features.size() != n || assignments.size() != n || income_classes.size() != n) {
        throw ValidationError("features, assignments and income classes must cover every household");
    }

    const FeatureSchema& schema = household_feature_schema();
    const auto matrix = to_feature_matrix(features);

    double total_weight = 0.0;
    for (const auto& hh : store.households) {
        total_weight += hh.hh_weight;
    }

    ClusterSummaryTable table;
    for (std::size_t c = 0; c < cluster_count; ++c) {
        ClusterRow row;
        row.cluster = c;

        std::vector<std::size_t> members;
        for (std::size_t h = 0; h < n; ++h) {
            if (assignments[h] == c) {
                members.push_back(h);
            }
        }
        row.n_households = members.size();
        if (members.empty()) {
            throw ValidationError("cluster " + cluster_label(c) + " has no households");
        }

        double weight = 0.0;
        double low_w = 0.0;
        std::size_t low_n = 0;
        for (const std::size_t h : members) {
            weight += store.households[h].hh_weight;
            if (income_classes[h] == IncomeClass::low_income) {
                ++low_n;
                low_w += store.households[h].hh_weight;
            }
        }
        row.weight_sum = weight;
        row.share_pct_unweighted = 100.0 * static_cast<double>(members.size()) / static_cast<double>(n);
        row.share_pct_weighted = total_weight > 0.0 ? 100.0 * weight / total_weight : 0.0;
        row.low_income_pct_unweighted =
            100.0 * static_cast<double>(low_n) / static_cast<double>(members.size());
        row.low_income_pct_weighted = weight > 0.0 ? 100.0 * low_w / weight : 0.0;

        for (std::size_t j = 0; j < schema.numeric_count(); ++j) {
            NumericSummary num;
            num.variable = schema.numeric_column(j).name;
            std::vector<double> vals;
            std::vector<std::pair<double, double>> weighted_vals;
            vals.reserve(members.size());
            for (const std::size_t h : members) {
                vals.push_back(matrix[h].numeric[j]);
                weighted_vals.emplace_back(matrix[h].numeric[j], store.households[h].hh_weight);
            }
            num.median_unweighted = median(std::move(vals));
            num.median_weighted = weighted_median(std::move(weighted_vals));
            row.numerics.push_back(std::move(num));
        }

        for (std::size_t j = 0; j < schema.categorical_count(); ++j) {
            const Column& col = schema.categorical_column(j);
            VariableShare var;
            var.variable = col.name;
            std::vector<std::size_t> counts(col.categories.size(), 0);
            std::vector<double> wcounts(col.categories.size(), 0.0);
            for (const std::size_t h : members) {
                const auto level = static_cast<std::size_t>(matrix[h].categorical[j]);
                ++counts[level];
                wcounts[level] += store.households[h].hh_weight;
            }
            for (std::size_t l = 0; l < col.categories.size(); ++l) {
                LevelShare share;
                share.level = col.categories[l];
                share.pct_unweighted =
                    100.0 * static_cast<double>(counts[l]) / static_cast<double>(members.size());
                share.pct_weighted = weight > 0.0 ? 100.0 * wcounts[l] / weight : 0.0;
                var.levels.push_back(std::move(share));
            }
            row.categoricals.push_back(std::move(var));
        }
        table.push_back(std::move(row));
    }
    return table;
}

namespace {

std::string opt_to_csv(const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : std::string();
}

} // namespace

std::string gaps_to_csv(const GapReport& report) {
    csv::Table table({"metric", "group", "n_low", "n_notlow", "mean_low", "mean_notlow", "difference",
                      "p_value", "significant"},
                     {});
    for (const auto& e : report) {
        const bool ok = e.difference.has_value();
        table.append_row({to_string(e.metric), e.group_label, std::to_string(e.low.n_unweighted),
                          std::to_string(e.not_low.n_unweighted),
                          ok ? format_double(e.low.mean) : std::string(),
                          ok ? format_double(e.not_low.mean) : std::string(), opt_to_csv(e.difference),
                          opt_to_csv(e.p_value),
                          ok ? (e.significant_5pct ? "true" : "false") : std::string()});
    }
    return table.to_string();
}

std::string cluster_summary_to_csv(const ClusterSummaryTable& table) {
    csv::Table out({"cluster", "variable", "level", "unweighted", "weighted"}, {});
    for (const auto& row : table) {
        const std::string label = cluster_label(row.cluster);
        out.append_row({label, "households", "count", std::to_string(row.n_households),
                        format_double_fixed(row.weight_sum, 2)});
        out.append_row({label, "households", "share_pct", format_double_fixed(row.share_pct_unweighted, 2),
                        format_double_fixed(row.share_pct_weighted, 2)});
        out.append_row({label, "low_income", "share_pct",
                        format_double_fixed(row.low_income_pct_unweighted, 2),
                        format_double_fixed(row.low_income_pct_weighted, 2)});
        for (const auto& num : row.numerics) {
            out.append_row({label, num.variable, "median", format_double(num.median_unweighted),
                            format_double(num.median_weighted)});
        }
        for (const auto& var : row.categoricals) {
            for (const auto& level : var.levels) {
                out.append_row({label, var.variable, level.level,
                                format_double_fixed(level.pct_unweighted, 2),
                                format_double_fixed(level.pct_weighted, 2)});
            }
        }
    }
    return out.to_string();
}

namespace {

nlohmann::json group_stat_to_json(const GroupStat& s) {
    nlohmann::json j;
    j["n"] = s.n_unweighted;
    if (s.n_unweighted > 0) {
        j["n_effective"] = s.n_effective;
        j["mean"] = s.mean;
        if (std::isfinite(s.variance_of_mean)) {
            j["variance_of_mean"] = s.variance_of_mean;
        } else {
            j["variance_of_mean"] = nullptr;
        }
    }
    return j;
}

} // namespace

std::string report_bundle_to_json(const GapReport& report, const ClusterSummaryTable& table,
                                  Weighting weighting) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["weighting"] = weighting == Weighting::weighted ? "weighted" : "unweighted";

    nlohmann::json gaps = nlohmann::json::array();
    for (const auto& e : report) {
        nlohmann::json j;
        j["metric"] = to_string(e.metric);
        j["unit"] = metric_unit(e.metric);
        j["group"] = e.group_label;
        j["status"] = e.difference.has_value() ? "ok" : "insufficient_data";
        j["low"] = group_stat_to_json(e.low);
        j["not_low"] = group_stat_to_json(e.not_low);
        if (e.difference.has_value()) {
            j["difference"] = *e.difference;
        }
        if (e.p_value.has_value()) {
            j["p_value"] = *e.p_value;
            j["significant_5pct"] = e.significant_5pct;
        }
        gaps.push_back(std::move(j));
    }
    doc["gaps"] = std::move(gaps);

    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& row : table) {
        nlohmann::json j;
        j["cluster"] = cluster_label(row.cluster);
        j["n_households"] = row.n_households;
        j["weight_sum"] = row.weight_sum;
        j["share_pct"] = nlohmann::json{{"unweighted", row.share_pct_unweighted},
                                        {"weighted", row.share_pct_weighted}};
        j["low_income_pct"] = nlohmann::json{{"unweighted", row.low_income_pct_unweighted},
                                             {"weighted", row.low_income_pct_weighted}};
        nlohmann::json numerics = nlohmann::json::object();
        for (const auto& num : row.numerics) {
            numerics[num.variable] = nlohmann::json{{"median_unweighted", num.median_unweighted},
                                                    {"median_weighted", num.median_weighted}};
        }
        j["numeric"] = std::move(numerics);
        nlohmann::json cats = nlohmann::json::object();
        for (const auto& var : row.categoricals) {
            nlohmann::json levels = nlohmann::json::object();
            for (const auto& level : var.levels) {
                levels[level.level] = nlohmann::json{{"pct_unweighted", level.pct_unweighted},
                                                     {"pct_weighted", level.pct_weighted}};
            }
            cats[var.variable] = std::move(levels);
        }
        j["categorical"] = std::move(cats);
        clusters.push_back(std::move(j));
    }
    doc["cluster_summary"] = std::move(clusters);
    return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write file: " + path.string());
    }
    out << content;
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

} // namespace mobgap
