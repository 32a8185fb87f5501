#include "mobgap/survey.hpp"

#include "mobgap/csv.hpp"
#include "mobgap/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>

namespace mobgap {

namespace {

std::string strip_leading_zeros(const std::string& code) {
    std::size_t i = 0;
    while (i + 1 < code.size() && code[i] == '0') {
        ++i;
    }
    return code.substr(i);
}

Sex parse_sex(const std::string& raw) {
    const std::string v = strip_leading_zeros(raw);
    if (v == "1") {
        return Sex::male;
    }
    if (v == "2") {
        return Sex::female;
    }
    return Sex::unknown;
}

bool parse_worker(const std::string& raw) {
    const std::string v = strip_leading_zeros(raw);
    return v == "1" || v == "yes" || v == "Y";
}

bool parse_urban(const std::string& raw, const std::string& ctx) {
    const std::string v = strip_leading_zeros(raw);
    if (v == "1" || v == "urban") {
        return true;
    }
    if (v == "2" || v == "rural") {
        return false;
    }
    throw ValidationError(ctx + ": unrecognized urban/rural code '" + raw + "'");
}

const std::string& mapped(const std::map<std::string, std::string>& map, const std::string& field,
                          const std::string& file_kind) {
    const auto it = map.find(field);
    if (it == map.end()) {
        throw ValidationError("column map is missing the " + file_kind + " field '" + field + "'");
    }
    return it->second;
}

} // namespace

ColumnMap ColumnMap::nhts2017() {
    ColumnMap m;
    m.household = {{"household_id", "HOUSEID"}, {"size", "HHSIZE"},
                   {"vehicle_count", "HHVEHCNT"}, {"driver_count", "DRVRCNT"},
                   {"income", "HHFAMINC"},       {"race", "HH_RACE"},
                   {"region_code", "HHCNTYFP"},  {"urban_flag", "URBRUR"},
                   {"weight", "WTHHFIN"}};
    m.person = {{"household_id", "HOUSEID"}, {"person_id", "PERSONID"}, {"age", "R_AGE"},
                {"sex", "R_SEX"},            {"worker", "WORKER"},      {"education", "EDUC"},
                {"weight", "WTPERFIN"}};
    m.trip = {{"household_id", "HOUSEID"}, {"person_id", "PERSONID"},
              {"trip_id", "TDTRPNUM"},     {"distance", "TRPMILES"},
              {"duration", "TRVLCMIN"},    {"mode", "TRPTRANS"},
              {"weight", "WTTRDFIN"}};
    m.income_kind = "bracket";
    return m;
}

ColumnMap ColumnMap::from_json_text(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(origin + ": column map parse error: " + e.what());
    }
    ColumnMap m = nhts2017();
    const auto merge = [&](const char* key, std::map<std::string, std::string>& into) {
        if (!doc.contains(key)) {
            return;
        }
        for (const auto& [field, column] : doc.at(key).items()) {
            into[field] = column.get<std::string>();
        }
    };
    merge("household", m.household);
    merge("person", m.person);
    merge("trip", m.trip);
    if (doc.contains("income_kind")) {
        m.income_kind = doc.at("income_kind").get<std::string>();
    }
    if (m.income_kind != "bracket" && m.income_kind != "exact") {
        throw ValidationError(origin + ": income_kind must be 'bracket' or 'exact'");
    }
    return m;
}

ColumnMap ColumnMap::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open column map: " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text, path.string());
}

std::size_t SurveyStore::household_index(const std::string& household_id) const {
    const auto it = household_by_id_.find(household_id);
    if (it == household_by_id_.end()) {
        throw ValidationError("unknown household id '" + household_id + "'");
    }
    return it->second;
}

SurveyStore load_survey(const std::filesystem::path& household_csv,
                        const std::filesystem::path& person_csv,
                        const std::filesystem::path& trip_csv, const ColumnMap& columns,
                        LoadMode mode) {
    SurveyStore store;
    auto& diag = store.diagnostics;

    const auto reject = [&](const std::string& file, std::size_t row, const std::string& message) {
        if (mode == LoadMode::strict) {
            throw ValidationError(file + " row " + std::to_string(row) + ": " + message);
        }
        diag.issues.push_back(LoadIssue{file, row, message});
    };

    // Households.
    {
        const auto table = csv::Table::read_file(household_csv);
        const std::string file = household_csv.string();
        const std::size_t c_id = table.column(mapped(columns.household, "household_id", "household"));
        const std::size_t c_size = table.column(mapped(columns.household, "size", "household"));
        const std::size_t c_veh = table.column(mapped(columns.household, "vehicle_count", "household"));
        const std::size_t c_drv = table.column(mapped(columns.household, "driver_count", "household"));
        const std::size_t c_inc = table.column(mapped(columns.household, "income", "household"));
        const std::size_t c_race = table.column(mapped(columns.household, "race", "household"));
        const std::size_t c_region = table.column(mapped(columns.household, "region_code", "household"));
        const std::size_t c_urban = table.column(mapped(columns.household, "urban_flag", "household"));
        const std::size_t c_weight = table.column(mapped(columns.household, "weight", "household"));

        diag.households_read = table.row_count();
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            const std::size_t row = r + 1;
            const std::string ctx = file + " row " + std::to_string(row);
            try {
                HouseholdRecord hh;
                hh.household_id = table.cell(r, c_id);
                if (hh.household_id.empty()) {
                    throw ValidationError("empty household id");
                }
                hh.size = static_cast<int>(csv::parse_int(table.cell(r, c_size), ctx));
                hh.vehicle_count = static_cast<int>(csv::parse_int(table.cell(r, c_veh), ctx));
                hh.driver_count = static_cast<int>(csv::parse_int(table.cell(r, c_drv), ctx));
                if (hh.size < 1) {
                    throw ValidationError("household size below 1");
                }
                if (hh.vehicle_count < 0 || hh.driver_count < 0) {
                    throw ValidationError("negative vehicle or driver count");
                }
                if (columns.income_kind == "exact") {
                    const double income = csv::parse_double(table.cell(r, c_inc), ctx);
                    if (income < 0.0) {
                        throw ValidationError("negative income");
                    }
                    hh.income = income;
                } else {
                    hh.income = table.cell(r, c_inc);
                }
                hh.race_code = table.cell(r, c_race);
                hh.region_code = table.cell(r, c_region);
                hh.urban = parse_urban(table.cell(r, c_urban), ctx);
                hh.hh_weight = csv::parse_double(table.cell(r, c_weight), ctx);
                if (hh.hh_weight < 0.0) {
                    throw ValidationError("negative household weight");
                }
                if (store.household_by_id_.count(hh.household_id) > 0) {
                    throw ValidationError("duplicate household id '" + hh.household_id + "'");
                }
                store.household_by_id_.emplace(hh.household_id, store.households.size());
                store.households.push_back(std::move(hh));
            } catch (const ValidationError& e) {
                reject(file, row, e.what());
            }
        }
        diag.households_kept = store.households.size();
    }

    // Persons.
    std::map<std::pair<std::string, std::string>, std::size_t> person_by_key;
    {
        const auto table = csv::Table::read_file(person_csv);
        const std::string file = person_csv.string();
        const std::size_t c_hh = table.column(mapped(columns.person, "household_id", "person"));
        const std::size_t c_id = table.column(mapped(columns.person, "person_id", "person"));
        const std::size_t c_age = table.column(mapped(columns.person, "age", "person"));
        const std::size_t c_sex = table.column(mapped(columns.person, "sex", "person"));
        const std::size_t c_worker = table.column(mapped(columns.person, "worker", "person"));
        const std::size_t c_educ = table.column(mapped(columns.person, "education", "person"));
        const std::size_t c_weight = table.column(mapped(columns.person, "weight", "person"));

        diag.persons_read = table.row_count();
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            const std::size_t row = r + 1;
            const std::string ctx = file + " row " + std::to_string(row);
            try {
                PersonRecord p;
                p.household_id = table.cell(r, c_hh);
                p.person_id = table.cell(r, c_id);
                if (store.household_by_id_.count(p.household_id) == 0) {
                    throw ValidationError("person references unknown household '" + p.household_id + "'");
                }
                p.age = static_cast<int>(csv::parse_int(table.cell(r, c_age), ctx));
                if (p.age < 0) {
                    throw ValidationError("negative age");
                }
                p.sex = parse_sex(table.cell(r, c_sex));
                p.worker = parse_worker(table.cell(r, c_worker));
                p.education_code = static_cast<int>(csv::parse_int(table.cell(r, c_educ), ctx));
                p.person_weight = csv::parse_double(table.cell(r, c_weight), ctx);
                if (p.person_weight < 0.0) {
                    throw ValidationError("negative person weight");
                }
                const auto key = std::make_pair(p.household_id, p.person_id);
                if (person_by_key.count(key) > 0) {
                    throw ValidationError("duplicate person id '" + p.person_id + "' in household '" +
                                          p.household_id + "'");
                }
                person_by_key.emplace(key, store.persons.size());
                store.persons.push_back(std::move(p));
            } catch (const ValidationError& e) {
                reject(file, row, e.what());
            }
        }
        diag.persons_kept = store.persons.size();
    }

    // Trips.
    {
        const auto table = csv::Table::read_file(trip_csv);
        const std::string file = trip_csv.string();
        const std::size_t c_hh = table.column(mapped(columns.trip, "household_id", "trip"));
        const std::size_t c_person = table.column(mapped(columns.trip, "person_id", "trip"));
        const auto c_trip = table.find_column(mapped(columns.trip, "trip_id", "trip"));
        const std::size_t c_dist = table.column(mapped(columns.trip, "distance", "trip"));
        const std::size_t c_dur = table.column(mapped(columns.trip, "duration", "trip"));
        const std::size_t c_mode = table.column(mapped(columns.trip, "mode", "trip"));
        const std::size_t c_weight = table.column(mapped(columns.trip, "weight", "trip"));

        diag.trips_read = table.row_count();
        std::size_t synthetic_trip_id = 0;
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            const std::size_t row = r + 1;
            const std::string ctx = file + " row " + std::to_string(row);
            try {
                TripRecord t;
                t.household_id = table.cell(r, c_hh);
                t.person_id = table.cell(r, c_person);
                if (person_by_key.count({t.household_id, t.person_id}) == 0) {
                    throw ValidationError("trip references unknown person '" + t.person_id +
                                          "' in household '" + t.household_id + "'");
                }
                t.trip_id = c_trip.has_value() ? table.cell(r, *c_trip)
                                               : std::to_string(++synthetic_trip_id);
                t.distance_miles = csv::parse_double(table.cell(r, c_dist), ctx);
                t.duration_minutes = csv::parse_double(table.cell(r, c_dur), ctx);
                if (t.distance_miles < 0.0 || t.duration_minutes < 0.0) {
                    throw ValidationError("negative trip distance or duration");
                }
                t.mode_code = table.cell(r, c_mode);
                t.trip_weight = csv::parse_double(table.cell(r, c_weight), ctx);
                if (t.trip_weight < 0.0) {
                    throw ValidationError("negative trip weight");
                }
                store.trips.push_back(std::move(t));
            } catch (const ValidationError& e) {
                reject(file, row, e.what());
            }
        }
        diag.trips_kept = store.trips.size();
    }

    // Index vectors.
    store.persons_of_household.resize(store.households.size());
    for (std::size_t i = 0; i < store.persons.size(); ++i) {
        store.persons_of_household[store.household_by_id_.at(store.persons[i].household_id)].push_back(i);
    }
    store.trips_of_person.resize(store.persons.size());
    for (std::size_t i = 0; i < store.trips.size(); ++i) {
        const auto key = std::make_pair(store.trips[i].household_id, store.trips[i].person_id);
        store.trips_of_person[person_by_key.at(key)].push_back(i);
    }
    return store;
}

GeographyMap GeographyMap::load(const std::filesystem::path& path) {
    const auto table = csv::Table::read_file(path);
    const std::size_t c_region = table.column("region_code");
    const std::size_t c_flag = table.column("nyc_flag");
    std::set<std::string> codes;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const std::string& flag = table.cell(r, c_flag);
        if (flag == "1" || flag == "true") {
            codes.insert(table.cell(r, c_region));
        } else if (flag != "0" && flag != "false") {
            throw ValidationError(path.string() + " row " + std::to_string(r + 2) +
                                  ": nyc_flag must be 0/1/true/false");
        }
    }
    return GeographyMap(std::move(codes));
}

HouseholdFeatures derive_features(const HouseholdRecord& household,
                                  const std::vector<const PersonRecord*>& members,
                                  const GeographyMap& geography, const DeriveOptions& options) {
    if (members.empty()) {
        throw ValidationError("household '" + household.household_id + "' has no person records");
    }

    HouseholdFeatures f;
    f.size = static_cast<double>(household.size);
    f.vehicle_count = static_cast<double>(household.vehicle_count);

    if (geography.is_nyc(household.region_code)) {
        f.location = Location::nyc;
    } else {
        f.location = household.urban ? Location::other_urban : Location::rural;
    }

    bool any_elderly = false;
    bool any_worker = false;
    int max_education = std::numeric_limits<int>::min();
    int males = 0;
    int females = 0;
    for (const PersonRecord* p : members) {
        any_elderly = any_elderly || p->age >= kElderlyAge;
        any_worker = any_worker || p->worker;
        max_education = std::max(max_education, p->education_code);
        males += p->sex == Sex::male ? 1 : 0;
        females += p->sex == Sex::female ? 1 : 0;
    }
    f.elderly = any_elderly ? ElderlyStatus::elderly : ElderlyStatus::non_elderly;
    f.employment = any_worker ? EmploymentStatus::working : EmploymentStatus::non_working;
    f.education = max_education >= options.college_education_code ? EducationStatus::higher
                                                                  : EducationStatus::lower;
    if (males < females) {
        f.gender_balance = GenderBalance::males_lt_females;
    } else if (males == females) {
        f.gender_balance = GenderBalance::males_eq_females;
    } else {
        f.gender_balance = GenderBalance::males_gt_females;
    }
    if (household.vehicle_count < household.driver_count) {
        f.vehicle_driver_balance = VehicleDriverBalance::veh_lt_drv;
    } else if (household.vehicle_count == household.driver_count) {
        f.vehicle_driver_balance = VehicleDriverBalance::veh_eq_drv;
    } else {
        f.vehicle_driver_balance = VehicleDriverBalance::veh_gt_drv;
    }
    f.race = household.race_code == options.white_race_code ? RaceGroup::white : RaceGroup::non_white;
    return f;
}

std::vector<HouseholdFeatures> derive_all_features(const SurveyStore& store,
                                                   const GeographyMap& geography,
                                                   const DeriveOptions& options) {
    std::vector<HouseholdFeatures> out;
    out.reserve(store.households.size());
    for (std::size_t h = 0; h < store.households.size(); ++h) {
        std::vector<const PersonRecord*> members;
        members.reserve(store.persons_of_household[h].size());
        for (const std::size_t p : store.persons_of_household[h]) {
            members.push_back(&store.persons[p]);
        }
        out.push_back(derive_features(store.households[h], members, geography, options));
    }
    return out;
}

const char* to_string(Location v) {
    switch (v) {
    case Location::nyc:
        return "nyc";
    case Location::other_urban:
        return "other_urban";
    case Location::rural:
        return "rural";
    }
    return "?";
}

const char* to_string(ElderlyStatus v) {
    return v == ElderlyStatus::elderly ? "elderly" : "non_elderly";
}

const char* to_string(RaceGroup v) {
    return v == RaceGroup::white ? "white" : "non_white";
}

const char* to_string(EmploymentStatus v) {
    return v == EmploymentStatus::working ? "working" : "non_working";
}

const char* to_string(EducationStatus v) {
    return v == EducationStatus::higher ? "higher" : "lower";
}

const char* to_string(GenderBalance v) {
    switch (v) {
    case GenderBalance::males_lt_females:
        return "males_lt_females";
    case GenderBalance::males_eq_females:
        return "males_eq_females";
    case GenderBalance::males_gt_females:
        return "males_gt_females";
    }
    return "?";
}

const char* to_string(VehicleDriverBalance v) {
    switch (v) {
    case VehicleDriverBalance::veh_lt_drv:
        return "veh_lt_drv";
    case VehicleDriverBalance::veh_eq_drv:
        return "veh_eq_drv";
    case VehicleDriverBalance::veh_gt_drv:
        return "veh_gt_drv";
    }
    return "?";
}

const FeatureSchema& household_feature_schema() {
    static const FeatureSchema schema{{
        Column{"hh_size", ColumnKind::numeric, {}},
        Column{"vehicle_count", ColumnKind::numeric, {}},
        Column{"location", ColumnKind::categorical, {"nyc", "other_urban", "rural"}},
        Column{"elderly", ColumnKind::categorical, {"elderly", "non_elderly"}},
        Column{"race", ColumnKind::categorical, {"white", "non_white"}},
        Column{"employment", ColumnKind::categorical, {"working", "non_working"}},
        Column{"education", ColumnKind::categorical, {"higher", "lower"}},
        Column{"gender_balance",
               ColumnKind::categorical,
               {"males_lt_females", "males_eq_females", "males_gt_females"}},
        Column{"vehicle_driver_balance",
               ColumnKind::categorical,
               {"veh_lt_drv", "veh_eq_drv", "veh_gt_drv"}},
    }};
    return schema;
}

std::vector<FeatureVector> to_feature_matrix(const std::vector<HouseholdFeatures>& features) {
    if (features.empty()) {
        throw ValidationError("feature matrix needs at least one household");
    }
    std::vector<FeatureVector> out;
    out.reserve(features.size());
    for (const auto& f : features) {
        FeatureVector v;
        v.numeric = {f.size, f.vehicle_count};
        v.categorical = {
            static_cast<std::int32_t>(f.location),
            static_cast<std::int32_t>(f.elderly),
            static_cast<std::int32_t>(f.race),
            static_cast<std::int32_t>(f.employment),
            static_cast<std::int32_t>(f.education),
            static_cast<std::int32_t>(f.gender_balance),
            static_cast<std::int32_t>(f.vehicle_driver_balance),
        };
        out.push_back(std::move(v));
    }
    return out;
}

IncomeObservation make_income_observation(const HouseholdRecord& household) {
    return IncomeObservation{household.region_code, household.size, household.income};
}

} // namespace mobgap
