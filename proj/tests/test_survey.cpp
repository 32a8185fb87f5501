#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mobgap/errors.hpp"
#include "mobgap/survey.hpp"
#include "test_support.hpp"

#include <string>

using namespace mobgap;
using namespace testsupport;

namespace {

const std::string kHouseholdHeader =
    "HOUSEID,HHSIZE,HHVEHCNT,DRVRCNT,HHFAMINC,HH_RACE,HHCNTYFP,URBRUR,WTHHFIN\n";
const std::string kPersonHeader = "HOUSEID,PERSONID,R_AGE,R_SEX,WORKER,EDUC,WTPERFIN\n";
const std::string kTripHeader = "HOUSEID,PERSONID,TDTRPNUM,TRPMILES,TRVLCMIN,TRPTRANS,WTTRDFIN\n";

struct Fixture {
    TempDir dir{"survey"};
    std::filesystem::path hh = dir.path() / "hh.csv";
    std::filesystem::path pp = dir.path() / "pp.csv";
    std::filesystem::path tt = dir.path() / "tt.csv";

    void write(const std::string& households, const std::string& persons, const std::string& trips) {
        write_file(hh, kHouseholdHeader + households);
        write_file(pp, kPersonHeader + persons);
        write_file(tt, kTripHeader + trips);
    }

    SurveyStore load(LoadMode mode = LoadMode::strict) {
        return load_survey(hh, pp, tt, ColumnMap::nhts2017(), mode);
    }
};

std::string five_households() {
    std::string rows;
    for (int i = 1; i <= 5; ++i) {
        rows += "H" + std::to_string(i) + ",2,1,1,05,01,36061,01,100\n";
    }
    return rows;
}

std::string five_household_persons() {
    std::string rows;
    for (int i = 1; i <= 5; ++i) {
        rows += "H" + std::to_string(i) + ",01,40,01,01,4,100\n";
        rows += "H" + std::to_string(i) + ",02,38,02,02,2,100\n";
    }
    return rows;
}

PersonRecord person(int age, Sex sex, bool worker, int educ) {
    PersonRecord p;
    p.age = age;
    p.sex = sex;
    p.worker = worker;
    p.education_code = educ;
    return p;
}

HouseholdRecord household(int size, int vehicles, int drivers) {
    HouseholdRecord hh;
    hh.household_id = "H";
    hh.size = size;
    hh.vehicle_count = vehicles;
    hh.driver_count = drivers;
    hh.race_code = "01";
    hh.region_code = "36001";
    hh.urban = true;
    return hh;
}

HouseholdFeatures derive(const HouseholdRecord& hh, const std::vector<PersonRecord>& members,
                         const GeographyMap& geo = GeographyMap{}) {
    std::vector<const PersonRecord*> ptrs;
    for (const auto& m : members) {
        ptrs.push_back(&m);
    }
    return derive_features(hh, ptrs, geo);
}

} // namespace

TEST_CASE("well-formed extract loads with zero diagnostics") {
    Fixture fx;
    fx.write(five_households(), five_household_persons(),
             "H1,01,01,3.5,20,03,100\nH2,02,01,1.25,10,01,100\n");
    const auto store = fx.load();
    CHECK(store.households.size() == 5);
    CHECK(store.persons.size() == 10);
    CHECK(store.trips.size() == 2);
    CHECK(store.diagnostics.issues.empty());
    CHECK(store.persons_of_household[0].size() == 2);
    CHECK(store.trips_of_person[store.household_index("H1") * 2].size() == 1);

    const auto& h1 = store.households[store.household_index("H1")];
    CHECK(h1.size == 2);
    CHECK(std::get<std::string>(h1.income) == "05");
    CHECK(h1.urban);
}

TEST_CASE("orphan trips are dropped in lenient mode and fatal in strict mode") {
    Fixture fx;
    fx.write(five_households(), five_household_persons(),
             "H1,01,01,3.5,20,03,100\nH9,01,01,1,5,01,100\nH2,01,01,2,9,01,100\n");

    SUBCASE("lenient keeps the valid rows and records the issue") {
        const auto store = fx.load(LoadMode::lenient);
        CHECK(store.trips.size() == 2);
        REQUIRE(store.diagnostics.issues.size() == 1);
        CHECK(store.diagnostics.issues[0].row == 2);
        CHECK(store.diagnostics.issues[0].message.find("H9") != std::string::npos);
    }
    SUBCASE("strict aborts naming the row") {
        CHECK_THROWS_WITH_AS(fx.load(LoadMode::strict), doctest::Contains("row 2"), ValidationError);
    }
}

TEST_CASE("orphan persons violate referential integrity") {
    Fixture fx;
    fx.write(five_households(), five_household_persons() + "H77,01,30,01,01,3,50\n", "");
    CHECK_THROWS_AS(fx.load(LoadMode::strict), ValidationError);
    const auto store = fx.load(LoadMode::lenient);
    CHECK(store.persons.size() == 10);
    CHECK(store.diagnostics.issues.size() == 1);
}

TEST_CASE("negative values are rejected with row context") {
    Fixture fx;

    SUBCASE("negative weight") {
        fx.write("H1,2,1,1,05,01,36061,01,-5\n", "", "");
        CHECK_THROWS_WITH_AS(fx.load(), doctest::Contains("negative household weight"),
                             ValidationError);
    }
    SUBCASE("negative distance") {
        fx.write(five_households(), five_household_persons(), "H1,01,01,-3.5,20,03,100\n");
        CHECK_THROWS_AS(fx.load(), ValidationError);
    }
    SUBCASE("negative duration lenient mode drops the row") {
        fx.write(five_households(), five_household_persons(), "H1,01,01,3.5,-20,03,100\n");
        const auto store = fx.load(LoadMode::lenient);
        CHECK(store.trips.empty());
        CHECK(store.diagnostics.issues.size() == 1);
    }
}

TEST_CASE("a missing mapped column is always fatal") {
    Fixture fx;
    write_file(fx.hh, "HOUSEID,HHSIZE\nH1,2\n");
    write_file(fx.pp, kPersonHeader);
    write_file(fx.tt, kTripHeader);
    CHECK_THROWS_WITH_AS(load_survey(fx.hh, fx.pp, fx.tt, ColumnMap::nhts2017(), LoadMode::lenient),
                         doctest::Contains("HHVEHCNT"), ValidationError);
}

TEST_CASE("column maps remap source names") {
    Fixture fx;
    write_file(fx.hh, "id,n,veh,drv,inc,race,county,ur,w\nA,3,2,2,41000,01,36061,01,10\n");
    write_file(fx.pp, "id,pid,age,sex,work,edu,w\nA,1,33,01,01,5,10\n");
    write_file(fx.tt, "id,pid,t,mi,min,mode,w\nA,1,1,2.5,11,01,10\n");

    const auto map = ColumnMap::from_json_text(R"({
      "household": {"household_id": "id", "size": "n", "vehicle_count": "veh",
                     "driver_count": "drv", "income": "inc", "race": "race",
                     "region_code": "county", "urban_flag": "ur", "weight": "w"},
      "person": {"household_id": "id", "person_id": "pid", "age": "age", "sex": "sex",
                  "worker": "work", "education": "edu", "weight": "w"},
      "trip": {"household_id": "id", "person_id": "pid", "trip_id": "t", "distance": "mi",
                "duration": "min", "mode": "mode", "weight": "w"},
      "income_kind": "exact"
    })",
                                               "inline");
    const auto store = load_survey(fx.hh, fx.pp, fx.tt, map);
    CHECK(store.households.size() == 1);
    CHECK(std::get<double>(store.households[0].income) == doctest::Approx(41000.0));
    CHECK(store.trips.size() == 1);

    CHECK_THROWS_AS(ColumnMap::from_json_text(R"({"income_kind": "dollars"})", "inline"),
                    ValidationError);
}

TEST_CASE("duplicate ids are rejected") {
    Fixture fx;
    fx.write("H1,2,1,1,05,01,36061,01,100\nH1,3,1,1,05,01,36061,01,100\n", "", "");
    CHECK_THROWS_WITH_AS(fx.load(), doctest::Contains("duplicate household"), ValidationError);
}

TEST_CASE("derive_features implements the nine-variable rules") {
    const GeographyMap nyc_map({"36061"});

    SUBCASE("a 70-year-old member makes the household elderly") {
        const auto f = derive(household(1, 1, 1), {person(70, Sex::female, false, 2)});
        CHECK(f.elderly == ElderlyStatus::elderly);
        CHECK(f.employment == EmploymentStatus::non_working);
        CHECK(f.education == EducationStatus::lower);
    }
    SUBCASE("two males two females balance out") {
        const auto f = derive(household(4, 1, 1),
                              {person(30, Sex::male, true, 3), person(31, Sex::male, false, 3),
                               person(29, Sex::female, false, 3), person(28, Sex::female, false, 3)});
        CHECK(f.gender_balance == GenderBalance::males_eq_females);
    }
    SUBCASE("three vehicles and two drivers") {
        const auto f = derive(household(2, 3, 2), {person(40, Sex::male, true, 4)});
        CHECK(f.vehicle_driver_balance == VehicleDriverBalance::veh_gt_drv);
        CHECK(f.education == EducationStatus::higher);
        CHECK(f.employment == EmploymentStatus::working);
    }
    SUBCASE("unknown sex is excluded from the gender counts") {
        const auto f = derive(household(2, 1, 1),
                              {person(40, Sex::male, true, 3), person(41, Sex::unknown, false, 3)});
        CHECK(f.gender_balance == GenderBalance::males_gt_females);

        const auto g = derive(household(1, 1, 1), {person(40, Sex::unknown, true, 3)});
        CHECK(g.gender_balance == GenderBalance::males_eq_females);
    }
    SUBCASE("location resolution order: NYC map, then urban flag") {
        auto hh = household(1, 0, 0);
        hh.region_code = "36061";
        CHECK(derive(hh, {person(30, Sex::male, true, 3)}, nyc_map).location == Location::nyc);
        hh.region_code = "36001";
        CHECK(derive(hh, {person(30, Sex::male, true, 3)}, nyc_map).location == Location::other_urban);
        hh.urban = false;
        CHECK(derive(hh, {person(30, Sex::male, true, 3)}, nyc_map).location == Location::rural);
    }
    SUBCASE("race dichotomy uses the configured white code") {
        auto hh = household(1, 0, 0);
        hh.race_code = "02";
        CHECK(derive(hh, {person(30, Sex::male, true, 3)}).race == RaceGroup::non_white);
    }
    SUBCASE("zero persons is a derivation error") {
        CHECK_THROWS_AS(derive(household(1, 0, 0), {}), ValidationError);
    }
}

TEST_CASE("any-member predicates are monotone under adding members") {
    Rng rng(5150);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<PersonRecord> members;
        const std::size_t base = 1 + rng.bounded(3);
        for (std::size_t i = 0; i < base; ++i) {
            members.push_back(person(20 + static_cast<int>(rng.bounded(70)),
                                     rng.bounded(2) == 0 ? Sex::male : Sex::female,
                                     rng.bounded(2) == 0, 1 + static_cast<int>(rng.bounded(5))));
        }
        const auto hh = household(static_cast<int>(base) + 1, 1, 1);
        const auto before = derive(hh, members);

        members.push_back(person(66, Sex::unknown, true, 5));
        const auto after = derive(hh, members);

        CHECK(after.elderly == ElderlyStatus::elderly);
        CHECK(after.employment == EmploymentStatus::working);
        CHECK(after.education == EducationStatus::higher);
        if (before.elderly == ElderlyStatus::elderly) {
            CHECK(after.elderly == ElderlyStatus::elderly);
        }
        // Unknown sex leaves the balance untouched.
        CHECK(after.gender_balance == before.gender_balance);
    }
}

TEST_CASE("to_feature_matrix maps onto the canonical schema") {
    const auto& schema = household_feature_schema();
    CHECK(schema.numeric_count() == 2);
    CHECK(schema.categorical_count() == 7);

    SUBCASE("first-level categoricals map to index zero") {
        HouseholdFeatures f;
        f.size = 2;
        f.vehicle_count = 1;
        f.location = Location::nyc;
        f.elderly = ElderlyStatus::elderly;
        f.race = RaceGroup::white;
        f.employment = EmploymentStatus::working;
        f.education = EducationStatus::higher;
        f.gender_balance = GenderBalance::males_lt_females;
        f.vehicle_driver_balance = VehicleDriverBalance::veh_lt_drv;

        const auto matrix = to_feature_matrix({f});
        REQUIRE(matrix.size() == 1);
        CHECK(matrix[0].numeric == std::vector<double>{2.0, 1.0});
        CHECK(matrix[0].categorical == std::vector<std::int32_t>{0, 0, 0, 0, 0, 0, 0});
        schema.validate(matrix[0]);
    }
    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(to_feature_matrix({}), ValidationError);
    }
    SUBCASE("households differing only in location differ in exactly one index") {
        HouseholdFeatures a;
        a.size = 3;
        a.vehicle_count = 2;
        a.location = Location::nyc;
        HouseholdFeatures b = a;
        b.location = Location::rural;

        const auto matrix = to_feature_matrix({a, b});
        CHECK(matrix[0].numeric == matrix[1].numeric);
        int diffs = 0;
        for (std::size_t j = 0; j < matrix[0].categorical.size(); ++j) {
            diffs += matrix[0].categorical[j] != matrix[1].categorical[j] ? 1 : 0;
        }
        CHECK(diffs == 1);
        CHECK(matrix[0].categorical[0] == 0);
        CHECK(matrix[1].categorical[0] == 2);
    }
}

TEST_CASE("geography map loads and flags the five boroughs") {
    const auto geo = GeographyMap::load(data_path("geography_nyc.csv"));
    CHECK(geo.is_nyc("36061"));
    CHECK(geo.is_nyc("36085"));
    CHECK_FALSE(geo.is_nyc("36001"));
}
