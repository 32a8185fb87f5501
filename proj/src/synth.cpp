#include "mobgap/synth.hpp"

#include "mobgap/csv.hpp"
#include "mobgap/errors.hpp"
#include "mobgap/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mobgap {

namespace {

template <typename Enum>
Enum noisy_level(Rng& rng, Enum planted, std::size_t level_count, double purity) {
    if (purity >= 1.0 || rng.uniform01() < purity) {
        return planted;
    }
    // Uniform over the other levels.
    auto raw = static_cast<std::size_t>(rng.bounded(level_count - 1));
    if (raw >= static_cast<std::size_t>(planted)) {
        ++raw;
    }
    return static_cast<Enum>(raw);
}

int draw_count(Rng& rng, const std::pair<double, double>& mean_sd, int lo, int hi) {
    const double v = mean_sd.second <= 0.0 ? mean_sd.first : rng.normal(mean_sd.first, mean_sd.second);
    return std::clamp(static_cast<int>(std::lround(v)), lo, hi);
}

int draw_age(Rng& rng, const std::pair<int, int>& range) {
    if (range.second <= range.first) {
        return range.first;
    }
    return range.first + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(range.second - range.first + 1)));
}

std::string pad2(std::size_t n) {
    std::string s = std::to_string(n);
    return s.size() < 2 ? "0" + s : s;
}

// Largest-remainder apportionment of n households over the group shares.
std::vector<std::size_t> apportion(const std::vector<GroupPlan>& groups, std::size_t n) {
    std::vector<std::size_t> counts(groups.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double exact = groups[g].share * static_cast<double>(n);
        counts[g] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[g];
        remainders.emplace_back(exact - std::floor(exact), g);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
        ++counts[remainders[i % remainders.size()].second];
    }
    return counts;
}

template <typename Enum>
Enum enum_from_string(const std::string& text, std::size_t level_count, const std::string& what) {
    for (std::size_t i = 0; i < level_count; ++i) {
        if (text == to_string(static_cast<Enum>(i))) {
            return static_cast<Enum>(i);
        }
    }
    throw ValidationError("unknown " + what + " level '" + text + "'");
}

std::pair<double, double> pair_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw ValidationError("expected a [value, value] pair in survey spec");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json pair_to_json(const std::pair<double, double>& p) {
    return nlohmann::json::array({p.first, p.second});
}

MetricPlan metric_plan_from_json(const nlohmann::json& j) {
    MetricPlan m;
    m.trips_per_day = j.at("trips_per_day").get<double>();
    m.trip_miles = pair_from_json(j.at("trip_miles"));
    m.trip_minutes = pair_from_json(j.at("trip_minutes"));
    return m;
}

nlohmann::json metric_plan_to_json(const MetricPlan& m) {
    return nlohmann::json{{"trips_per_day", m.trips_per_day},
                          {"trip_miles", pair_to_json(m.trip_miles)},
                          {"trip_minutes", pair_to_json(m.trip_minutes)}};
}

void validate_spec(const SurveySpec& spec) {
    if (spec.households == 0) {
        throw ValidationError("survey spec needs at least one household");
    }
    if (spec.groups.empty()) {
        throw ValidationError("survey spec needs at least one group");
    }
    double total_share = 0.0;
    for (const auto& g : spec.groups) {
        if (g.share < 0.0) {
            throw ValidationError("group '" + g.name + "' has a negative share");
        }
        if (g.low_income_rate < 0.0 || g.low_income_rate > 1.0) {
            throw ValidationError("group '" + g.name + "' low_income_rate outside [0, 1]");
        }
        if (g.purity < 0.0 || g.purity > 1.0) {
            throw ValidationError("group '" + g.name + "' purity outside [0, 1]");
        }
        total_share += g.share;
    }
    if (std::fabs(total_share - 1.0) > 1e-6) {
        throw ValidationError("group shares sum to " + format_double(total_share) + ", expected 1");
    }
    if (spec.air_trip_share < 0.0 || spec.air_trip_share > 1.0) {
        throw ValidationError("air_trip_share outside [0, 1]");
    }
    if (spec.ground_mode_codes.empty()) {
        throw ValidationError("ground_mode_codes must not be empty");
    }
    if (spec.nyc_region_codes.empty() || spec.other_urban_region_codes.empty() ||
        spec.rural_region_codes.empty()) {
        throw ValidationError("every location level needs at least one region code");
    }
}

} // namespace

SurveySpec default_survey_spec() {
    SurveySpec spec;
    spec.households = 2000;
    spec.low_metrics = MetricPlan{3.0, {8.05, 2.0}, {22.0, 2.2}};
    spec.not_low_metrics = MetricPlan{3.4, {10.75, 2.7}, {20.2, 2.0}};

    GroupPlan g0;
    g0.name = "more_vehicles_than_drivers";
    g0.share = 0.142;
    g0.low_income_rate = 0.311;
    g0.size = {3.0, 0.3};
    g0.vehicles = {3.0, 0.3};
    g0.purity = 0.95;
    g0.location = Location::rural;
    g0.elderly = ElderlyStatus::non_elderly;
    g0.race = RaceGroup::white;
    g0.employment = EmploymentStatus::working;
    g0.education = EducationStatus::higher;
    g0.gender_balance = GenderBalance::males_eq_females;
    g0.vehicle_driver_balance = VehicleDriverBalance::veh_gt_drv;

    GroupPlan g1;
    g1.name = "balanced_gender_couples";
    g1.share = 0.298;
    g1.low_income_rate = 0.155;
    g1.size = {2.0, 0.3};
    g1.vehicles = {2.0, 0.3};
    g1.purity = 0.95;
    g1.location = Location::other_urban;
    g1.elderly = ElderlyStatus::elderly;
    g1.race = RaceGroup::white;
    g1.employment = EmploymentStatus::working;
    g1.education = EducationStatus::higher;
    g1.gender_balance = GenderBalance::males_eq_females;
    g1.vehicle_driver_balance = VehicleDriverBalance::veh_eq_drv;

    GroupPlan g2;
    g2.name = "educated_working_families";
    g2.share = 0.186;
    g2.low_income_rate = 0.202;
    g2.size = {4.0, 0.3};
    g2.vehicles = {2.0, 0.3};
    g2.purity = 0.95;
    g2.location = Location::other_urban;
    g2.elderly = ElderlyStatus::non_elderly;
    g2.race = RaceGroup::white;
    g2.employment = EmploymentStatus::working;
    g2.education = EducationStatus::higher;
    g2.gender_balance = GenderBalance::males_lt_females;
    g2.vehicle_driver_balance = VehicleDriverBalance::veh_eq_drv;

    GroupPlan g3;
    g3.name = "elderly_nonworking";
    g3.share = 0.164;
    g3.low_income_rate = 0.717;
    g3.size = {1.0, 0.3};
    g3.vehicles = {1.0, 0.3};
    g3.purity = 0.95;
    g3.location = Location::other_urban;
    g3.elderly = ElderlyStatus::elderly;
    g3.race = RaceGroup::white;
    g3.employment = EmploymentStatus::non_working;
    g3.education = EducationStatus::lower;
    g3.gender_balance = GenderBalance::males_lt_females;
    g3.vehicle_driver_balance = VehicleDriverBalance::veh_eq_drv;

    GroupPlan g4;
    g4.name = "nyc_male_majority";
    g4.share = 0.211;
    g4.low_income_rate = 0.258;
    g4.size = {1.0, 0.3};
    g4.vehicles = {0.0, 0.3};
    g4.purity = 0.95;
    g4.location = Location::nyc;
    g4.elderly = ElderlyStatus::non_elderly;
    g4.race = RaceGroup::white;
    g4.employment = EmploymentStatus::working;
    g4.education = EducationStatus::higher;
    g4.gender_balance = GenderBalance::males_gt_females;
    g4.vehicle_driver_balance = VehicleDriverBalance::veh_lt_drv;

    spec.groups = {g0, g1, g2, g3, g4};
    // The shares above are rounded to one decimal and total 100.1%;
    // normalize so the share-sum check passes.
    double total = 0.0;
    for (const auto& g : spec.groups) {
        total += g.share;
    }
    for (auto& g : spec.groups) {
        g.share /= total;
    }
    return spec;
}

SurveySpec survey_spec_from_json_text(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(origin + ": survey spec parse error: " + e.what());
    }
    SurveySpec spec;
    spec.groups.clear();
    spec.households = doc.at("households").get<std::size_t>();
    if (doc.contains("adult_age_range")) {
        const auto p = pair_from_json(doc.at("adult_age_range"));
        spec.adult_age_range = {static_cast<int>(p.first), static_cast<int>(p.second)};
    }
    if (doc.contains("elder_age_range")) {
        const auto p = pair_from_json(doc.at("elder_age_range"));
        spec.elder_age_range = {static_cast<int>(p.first), static_cast<int>(p.second)};
    }
    if (doc.contains("weights")) {
        const auto& w = doc.at("weights");
        if (w.contains("household")) {
            spec.household_weight_range = pair_from_json(w.at("household"));
        }
        if (w.contains("person_factor")) {
            spec.person_weight_factor = pair_from_json(w.at("person_factor"));
        }
        if (w.contains("trip_factor")) {
            spec.trip_weight_factor = pair_from_json(w.at("trip_factor"));
        }
    }
    if (doc.contains("income_multiplier")) {
        const auto& m = doc.at("income_multiplier");
        if (m.contains("low")) {
            spec.income_multiplier_low = pair_from_json(m.at("low"));
        }
        if (m.contains("not_low")) {
            spec.income_multiplier_not_low = pair_from_json(m.at("not_low"));
        }
    }
    if (doc.contains("air")) {
        const auto& a = doc.at("air");
        spec.air_trip_share = a.value("share", 0.0);
        spec.air_mode_code = a.value("mode_code", std::string("19"));
        if (a.contains("miles")) {
            spec.air_miles = pair_from_json(a.at("miles"));
        }
        if (a.contains("minutes")) {
            spec.air_minutes = pair_from_json(a.at("minutes"));
        }
    }
    if (doc.contains("ground_mode_codes")) {
        spec.ground_mode_codes = doc.at("ground_mode_codes").get<std::vector<std::string>>();
    }
    if (doc.contains("region_codes")) {
        const auto& rc = doc.at("region_codes");
        if (rc.contains("nyc")) {
            spec.nyc_region_codes = rc.at("nyc").get<std::vector<std::string>>();
        }
        if (rc.contains("other_urban")) {
            spec.other_urban_region_codes = rc.at("other_urban").get<std::vector<std::string>>();
        }
        if (rc.contains("rural")) {
            spec.rural_region_codes = rc.at("rural").get<std::vector<std::string>>();
        }
    }
    spec.low_metrics = metric_plan_from_json(doc.at("metrics").at("low"));
    spec.not_low_metrics = metric_plan_from_json(doc.at("metrics").at("not_low"));

    for (const auto& jg : doc.at("groups")) {
        GroupPlan g;
        g.name = jg.at("name").get<std::string>();
        g.share = jg.at("share").get<double>();
        g.low_income_rate = jg.at("low_income_rate").get<double>();
        g.size = pair_from_json(jg.at("size"));
        g.vehicles = pair_from_json(jg.at("vehicles"));
        g.purity = jg.value("purity", 1.0);
        g.location = enum_from_string<Location>(jg.at("location").get<std::string>(), 3, "location");
        g.elderly = enum_from_string<ElderlyStatus>(jg.at("elderly").get<std::string>(), 2, "elderly");
        g.race = enum_from_string<RaceGroup>(jg.at("race").get<std::string>(), 2, "race");
        g.employment =
            enum_from_string<EmploymentStatus>(jg.at("employment").get<std::string>(), 2, "employment");
        g.education =
            enum_from_string<EducationStatus>(jg.at("education").get<std::string>(), 2, "education");
        g.gender_balance = enum_from_string<GenderBalance>(jg.at("gender_balance").get<std::string>(), 3,
                                                           "gender_balance");
        g.vehicle_driver_balance = enum_from_string<VehicleDriverBalance>(
            jg.at("vehicle_driver_balance").get<std::string>(), 3, "vehicle_driver_balance");
        if (jg.contains("metrics")) {
            const auto& jm = jg.at("metrics");
            if (jm.contains("low")) {
                g.low_metrics = metric_plan_from_json(jm.at("low"));
            }
            if (jm.contains("not_low")) {
                g.not_low_metrics = metric_plan_from_json(jm.at("not_low"));
            }
        }
        spec.groups.push_back(std::move(g));
    }
    validate_spec(spec);
    return spec;
}

SurveySpec survey_spec_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open survey spec: " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return survey_spec_from_json_text(text, path.string());
}

std::string survey_spec_to_json(const SurveySpec& spec) {
    nlohmann::json doc;
    doc["households"] = spec.households;
    doc["adult_age_range"] =
        nlohmann::json::array({spec.adult_age_range.first, spec.adult_age_range.second});
    doc["elder_age_range"] =
        nlohmann::json::array({spec.elder_age_range.first, spec.elder_age_range.second});
    doc["weights"] = nlohmann::json{{"household", pair_to_json(spec.household_weight_range)},
                                    {"person_factor", pair_to_json(spec.person_weight_factor)},
                                    {"trip_factor", pair_to_json(spec.trip_weight_factor)}};
    doc["income_multiplier"] = nlohmann::json{{"low", pair_to_json(spec.income_multiplier_low)},
                                              {"not_low", pair_to_json(spec.income_multiplier_not_low)}};
    doc["air"] = nlohmann::json{{"share", spec.air_trip_share},
                                {"mode_code", spec.air_mode_code},
                                {"miles", pair_to_json(spec.air_miles)},
                                {"minutes", pair_to_json(spec.air_minutes)}};
    doc["ground_mode_codes"] = spec.ground_mode_codes;
    doc["region_codes"] = nlohmann::json{{"nyc", spec.nyc_region_codes},
                                         {"other_urban", spec.other_urban_region_codes},
                                         {"rural", spec.rural_region_codes}};
    doc["metrics"] = nlohmann::json{{"low", metric_plan_to_json(spec.low_metrics)},
                                    {"not_low", metric_plan_to_json(spec.not_low_metrics)}};
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : spec.groups) {
        nlohmann::json jg;
        jg["name"] = g.name;
        jg["share"] = g.share;
        jg["low_income_rate"] = g.low_income_rate;
        jg["size"] = pair_to_json(g.size);
        jg["vehicles"] = pair_to_json(g.vehicles);
        jg["purity"] = g.purity;
        jg["location"] = to_string(g.location);
        jg["elderly"] = to_string(g.elderly);
        jg["race"] = to_string(g.race);
        jg["employment"] = to_string(g.employment);
        jg["education"] = to_string(g.education);
        jg["gender_balance"] = to_string(g.gender_balance);
        jg["vehicle_driver_balance"] = to_string(g.vehicle_driver_balance);
        if (g.low_metrics || g.not_low_metrics) {
            nlohmann::json jm;
            if (g.low_metrics) {
                jm["low"] = metric_plan_to_json(*g.low_metrics);
            }
            if (g.not_low_metrics) {
                jm["not_low"] = metric_plan_to_json(*g.not_low_metrics);
            }
            jg["metrics"] = std::move(jm);
        }
        groups.push_back(std::move(jg));
    }
    doc["groups"] = std::move(groups);
    return doc.dump(2) + "\n";
}

SynthResult synthesize(const SurveySpec& spec, const ThresholdTable& thresholds, std::uint64_t seed,
                       const std::filesystem::path& outdir) {
    validate_spec(spec);
    std::filesystem::create_directories(outdir);

    Rng rng(seed);

    // Exact group allocation, then a seeded shuffle to interleave groups.
    const auto counts = apportion(spec.groups, spec.households);
    std::vector<std::size_t> group_of(spec.households);
    std::size_t cursor = 0;
    for (std::size_t g = 0; g < counts.size(); ++g) {
        for (std::size_t i = 0; i < counts[g]; ++i) {
            group_of[cursor++] = g;
        }
    }
    for (std::size_t i = spec.households; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(group_of[i - 1], group_of[j]);
    }

    csv::Table households({"HOUSEID", "HHSIZE", "HHVEHCNT", "DRVRCNT", "HHFAMINC", "HH_RACE",
                           "HHCNTYFP", "URBRUR", "WTHHFIN"},
                          {});
    csv::Table persons({"HOUSEID", "PERSONID", "R_AGE", "R_SEX", "WORKER", "EDUC", "WTPERFIN"}, {});
    csv::Table trips({"HOUSEID", "PERSONID", "TDTRPNUM", "TRPMILES", "TRVLCMIN", "TRPTRANS", "WTTRDFIN"},
                     {});
    csv::Table truth({"HOUSEID", "group_index", "group_name", "income_class", "hh_size",
                      "vehicle_count", "location", "elderly", "race", "employment", "education",
                      "gender_balance", "vehicle_driver_balance"},
                     {});

    for (std::size_t i = 0; i < spec.households; ++i) {
        const GroupPlan& group = spec.groups[group_of[i]];
        const std::string household_id = std::to_string(100001 + i);

        HouseholdFeatures f;
        f.location = noisy_level(rng, group.location, 3, group.purity);
        f.elderly = noisy_level(rng, group.elderly, 2, group.purity);
        f.race = noisy_level(rng, group.race, 2, group.purity);
        f.employment = noisy_level(rng, group.employment, 2, group.purity);
        f.education = noisy_level(rng, group.education, 2, group.purity);
        f.gender_balance = noisy_level(rng, group.gender_balance, 3, group.purity);
        f.vehicle_driver_balance = noisy_level(rng, group.vehicle_driver_balance, 3, group.purity);

        const int size = draw_count(rng, group.size, 1, 12);
        int vehicles = draw_count(rng, group.vehicles, 0, 12);
        int drivers = 0;
        switch (f.vehicle_driver_balance) {
        case VehicleDriverBalance::veh_lt_drv:
            drivers = vehicles + 1;
            break;
        case VehicleDriverBalance::veh_eq_drv:
            drivers = vehicles;
            break;
        case VehicleDriverBalance::veh_gt_drv:
            if (vehicles == 0) {
                vehicles = 1;
            }
            drivers = vehicles - 1;
            break;
        }
        f.size = static_cast<double>(size);
        f.vehicle_count = static_cast<double>(vehicles);

        std::string region_code;
        bool urban = true;
        switch (f.location) {
        case Location::nyc:
            region_code = spec.nyc_region_codes[rng.bounded(spec.nyc_region_codes.size())];
            break;
        case Location::other_urban:
            region_code =
                spec.other_urban_region_codes[rng.bounded(spec.other_urban_region_codes.size())];
            break;
        case Location::rural:
            region_code = spec.rural_region_codes[rng.bounded(spec.rural_region_codes.size())];
            urban = false;
            break;
        }

        const bool low = rng.uniform01() < group.low_income_rate;
        const double cutoff = thresholds.cutoff(region_code, size);
        const auto& mult = low ? spec.income_multiplier_low : spec.income_multiplier_not_low;
        const double income = std::round(cutoff * rng.uniform(mult.first, mult.second));
        const double hh_weight = rng.uniform(spec.household_weight_range.first,
                                             spec.household_weight_range.second);

        households.append_row({household_id, std::to_string(size), std::to_string(vehicles),
                               std::to_string(drivers), format_double(income),
                               f.race == RaceGroup::white ? "01" : "02", region_code,
                               urban ? "01" : "02", format_double(hh_weight)});

        // Realize the member sexes to match the planted gender balance; an
        // unknown-sex member absorbs odd counts for the equal case.
        int males = 0;
        int females = 0;
        switch (f.gender_balance) {
        case GenderBalance::males_eq_females:
            males = females = size / 2;
            break;
        case GenderBalance::males_lt_females:
            males = (size - 1) / 2;
            females = size - males;
            break;
        case GenderBalance::males_gt_females:
            females = (size - 1) / 2;
            males = size - females;
            break;
        }

        const MetricPlan& metrics =
            low ? group.low_metrics.value_or(spec.low_metrics)
                : group.not_low_metrics.value_or(spec.not_low_metrics);

        for (int m = 0; m < size; ++m) {
            const std::string person_id = pad2(static_cast<std::size_t>(m + 1));
            std::string sex_code = "-7";
            if (m < males) {
                sex_code = "01";
            } else if (m < males + females) {
                sex_code = "02";
            }
            const int age = (f.elderly == ElderlyStatus::elderly && m == 0)
                                ? draw_age(rng, spec.elder_age_range)
                                : draw_age(rng, spec.adult_age_range);
            bool worker = false;
            if (f.employment == EmploymentStatus::working) {
                worker = m == 0 || rng.uniform01() < 0.3;
            }
            // Member 0 carries the household's education level; the rest stay
            // below the college code so the planted level is exact.
            int education = 0;
            if (m == 0) {
                education = f.education == EducationStatus::higher ? 4 : 1;
            } else {
                education = 1 + static_cast<int>(rng.bounded(3));
            }
            const double person_weight =
                hh_weight * rng.uniform(spec.person_weight_factor.first, spec.person_weight_factor.second);

            persons.append_row({household_id, person_id, std::to_string(age), sex_code,
                                worker ? "01" : "02", std::to_string(education),
                                format_double(person_weight)});

            const double whole = std::floor(metrics.trips_per_day);
            int n_trips = static_cast<int>(whole);
            if (rng.uniform01() < metrics.trips_per_day - whole) {
                ++n_trips;
            }
            for (int t = 0; t < n_trips; ++t) {
                std::string mode;
                double miles = 0.0;
                double minutes = 0.0;
                if (spec.air_trip_share > 0.0 && rng.uniform01() < spec.air_trip_share) {
                    mode = spec.air_mode_code;
                    miles = rng.positive(spec.air_miles.first, spec.air_miles.second);
                    minutes = rng.positive(spec.air_minutes.first, spec.air_minutes.second);
                } else {
                    mode = spec.ground_mode_codes[rng.bounded(spec.ground_mode_codes.size())];
                    miles = rng.positive(metrics.trip_miles.first, metrics.trip_miles.second);
                    minutes = rng.positive(metrics.trip_minutes.first, metrics.trip_minutes.second);
                }
                const double trip_weight =
                    person_weight * rng.uniform(spec.trip_weight_factor.first, spec.trip_weight_factor.second);
                trips.append_row({household_id, person_id, pad2(static_cast<std::size_t>(t + 1)),
                                  format_double(miles), format_double(minutes), mode,
                                  format_double(trip_weight)});
            }
        }

        truth.append_row({household_id, std::to_string(group_of[i]), group.name,
                          low ? "low" : "not_low", std::to_string(size), std::to_string(vehicles),
                          to_string(f.location), to_string(f.elderly), to_string(f.race),
                          to_string(f.employment), to_string(f.education), to_string(f.gender_balance),
                          to_string(f.vehicle_driver_balance)});
    }

    SynthResult result{outdir / "households.csv", outdir / "persons.csv", outdir / "trips.csv",
                       outdir / "truth.csv"};
    households.write_file(result.households_csv);
    persons.write_file(result.persons_csv);
    trips.write_file(result.trips_csv);
    truth.write_file(result.truth_csv);
    return result;
}

std::vector<TruthRow> read_truth(const std::filesystem::path& path) {
    const auto table = csv::Table::read_file(path);
    const std::size_t c_id = table.column("HOUSEID");
    const std::size_t c_group = table.column("group_index");
    const std::size_t c_name = table.column("group_name");
    const std::size_t c_class = table.column("income_class");
    const std::size_t c_size = table.column("hh_size");
    const std::size_t c_veh = table.column("vehicle_count");
    const std::size_t c_loc = table.column("location");
    const std::size_t c_eld = table.column("elderly");
    const std::size_t c_race = table.column("race");
    const std::size_t c_emp = table.column("employment");
    const std::size_t c_edu = table.column("education");
    const std::size_t c_gen = table.column("gender_balance");
    const std::size_t c_vd = table.column("vehicle_driver_balance");

    std::vector<TruthRow> rows;
    rows.reserve(table.row_count());
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const std::string ctx = path.string() + " row " + std::to_string(r + 2);
        TruthRow row;
        row.household_id = table.cell(r, c_id);
        row.group = static_cast<std::size_t>(csv::parse_int(table.cell(r, c_group), ctx));
        row.group_name = table.cell(r, c_name);
        const std::string& cls = table.cell(r, c_class);
        if (cls == "low") {
            row.income_class = IncomeClass::low_income;
        } else if (cls == "not_low") {
            row.income_class = IncomeClass::not_low_income;
        } else {
            throw ValidationError(ctx + ": unknown income class '" + cls + "'");
        }
        row.features.size = csv::parse_double(table.cell(r, c_size), ctx);
        row.features.vehicle_count = csv::parse_double(table.cell(r, c_veh), ctx);
        row.features.location = enum_from_string<Location>(table.cell(r, c_loc), 3, "location");
        row.features.elderly = enum_from_string<ElderlyStatus>(table.cell(r, c_eld), 2, "elderly");
        row.features.race = enum_from_string<RaceGroup>(table.cell(r, c_race), 2, "race");
        row.features.employment =
            enum_from_string<EmploymentStatus>(table.cell(r, c_emp), 2, "employment");
        row.features.education = enum_from_string<EducationStatus>(table.cell(r, c_edu), 2, "education");
        row.features.gender_balance =
            enum_from_string<GenderBalance>(table.cell(r, c_gen), 3, "gender_balance");
        row.features.vehicle_driver_balance =
            enum_from_string<VehicleDriverBalance>(table.cell(r, c_vd), 3, "vehicle_driver_balance");
        rows.push_back(std::move(row));
    }
    return rows;
}

ColumnMap synthetic_column_map() {
    ColumnMap m = ColumnMap::nhts2017();
    m.income_kind = "exact";
    return m;
}

} // namespace mobgap
