#pragma once

#include "mobgap/income.hpp"
#include "mobgap/survey.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mobgap {

// Trip-behavior targets for one income class: mean person-trips per travel
// day and per-trip distance/duration as (mean, stddev). A zero stddev pins
// the value exactly.
struct MetricPlan {
    double trips_per_day = 3.0;
    std::pair<double, double> trip_miles{8.0, 2.0};
    std::pair<double, double> trip_minutes{20.0, 2.0};
};

// One planted socio-demographic group. `purity` is the probability that a
// categorical feature realizes the planted level; the remainder spreads
// uniformly over the other levels.
struct GroupPlan {
    std::string name;
    double share = 0.0;
    double low_income_rate = 0.0;
    std::pair<double, double> size{2.0, 0.5};
    std::pair<double, double> vehicles{2.0, 0.5};
    double purity = 1.0;
    Location location = Location::other_urban;
    ElderlyStatus elderly = ElderlyStatus::non_elderly;
    RaceGroup race = RaceGroup::white;
    EmploymentStatus employment = EmploymentStatus::working;
    EducationStatus education = EducationStatus::higher;
    GenderBalance gender_balance = GenderBalance::males_eq_females;
    VehicleDriverBalance vehicle_driver_balance = VehicleDriverBalance::veh_eq_drv;
    // Per-group trip-metric overrides; absent falls back to the SurveySpec
    // class-level plans.
    std::optional<MetricPlan> low_metrics;
    std::optional<MetricPlan> not_low_metrics;
};

struct SurveySpec {
    std::size_t households = 2000;
    std::pair<int, int> adult_age_range{25, 60};
    std::pair<int, int> elder_age_range{66, 88};
    std::pair<double, double> household_weight_range{500.0, 1500.0};
    std::pair<double, double> person_weight_factor{0.8, 1.2};
    std::pair<double, double> trip_weight_factor{0.9, 1.1};
    // Incomes are drawn as cutoff(region, size) times a multiplier from the
    // class range, so the planted class matches the classifier exactly.
    std::pair<double, double> income_multiplier_low{0.30, 1.00};
    std::pair<double, double> income_multiplier_not_low{1.05, 3.00};
    double air_trip_share = 0.0;
    std::string air_mode_code = "19";
    std::pair<double, double> air_miles{900.0, 150.0};
    std::pair<double, double> air_minutes{150.0, 20.0};
    std::vector<std::string> ground_mode_codes{"01", "02", "03", "04", "05", "06"};
    // County pools per location level; a household draws its region code
    // uniformly from its level's pool. Defaults cover the five NYC boroughs
    // plus a handful of upstate urban and rural county FIPS codes.
    std::vector<std::string> nyc_region_codes{"36005", "36047", "36061", "36081", "36085"};
    std::vector<std::string> other_urban_region_codes{"36001", "36029", "36055", "36067"};
    std::vector<std::string> rural_region_codes{"36003", "36097", "36099", "36121"};
    MetricPlan low_metrics;
    MetricPlan not_low_metrics;
    std::vector<GroupPlan> groups;
};

// The built-in five-group fixture: group shares, one low-income-dominated
// group, an overall low-income rate near 30%, and trip metrics planting
// per-day PMT / trip-length / trip-duration gaps of +12.4 mi, +2.7 mi and
// -1.8 min (not-low minus low).
SurveySpec default_survey_spec();

SurveySpec survey_spec_from_json_text(const std::string& text, const std::string& origin);
SurveySpec survey_spec_from_json_file(const std::filesystem::path& path);
std::string survey_spec_to_json(const SurveySpec& spec);

// Ground-truth sidecar row.
struct TruthRow {
    std::string household_id;
    std::size_t group = 0;
    std::string group_name;
    IncomeClass income_class = IncomeClass::not_low_income;
    HouseholdFeatures features; // as realized in the emitted records
};

struct SynthResult {
    std::filesystem::path households_csv;
    std::filesystem::path persons_csv;
    std::filesystem::path trips_csv;
    std::filesystem::path truth_csv;
};

// Writes households/persons/trips/truth CSVs into outdir. Byte-deterministic
// for a fixed (spec, seed). The threshold table supplies the income cutoffs
// the planted classes are drawn against.
SynthResult synthesize(const SurveySpec& spec, const ThresholdTable& thresholds, std::uint64_t seed,
                       const std::filesystem::path& outdir);

std::vector<TruthRow> read_truth(const std::filesystem::path& path);

// Column map matching the synthesized files (NHTS 2017 names, exact incomes).
ColumnMap synthetic_column_map();

} // namespace mobgap
