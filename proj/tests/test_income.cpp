#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mobgap/errors.hpp"
#include "mobgap/income.hpp"
#include "mobgap/util.hpp"
#include "test_support.hpp"

#include <string>

using namespace mobgap;
using testsupport::data_path;

namespace {

// Manhattan county FIPS; the fixture tables key NYC rows by borough.
const std::string kNyc = "36061";

IncomeObservation obs(const std::string& region, int size, double income) {
    return IncomeObservation{region, size, income};
}

} // namespace

TEST_CASE("fixture table loads with the published NYC 4-person cutoff") {
    const auto table = load_threshold_table(data_path("thresholds_hud_very_low_2017.csv"));
    CHECK(table.definition_name() == "HUD-very-low-2017");
    CHECK(table.cutoff(kNyc, 4) == doctest::Approx(47700.0));
}

TEST_CASE("threshold table load errors are distinct") {
    const std::string header = "definition,region_code,household_size,cutoff_usd\n";
    SUBCASE("non-positive cutoff") {
        CHECK_THROWS_WITH_AS(parse_threshold_table(header + "d,R,1,0\n", "t"),
                             doctest::Contains("non-positive cutoff"), ValidationError);
    }
    SUBCASE("monotonicity violation") {
        CHECK_THROWS_WITH_AS(parse_threshold_table(header + "d,R,3,30000\nd,R,4,29000\n", "t"),
                             doctest::Contains("decreases"), ValidationError);
    }
    SUBCASE("duplicate key") {
        CHECK_THROWS_WITH_AS(parse_threshold_table(header + "d,R,2,10000\nd,R,2,11000\n", "t"),
                             doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("mixed definitions") {
        CHECK_THROWS_WITH_AS(parse_threshold_table(header + "d1,R,1,10000\nd2,R,2,11000\n", "t"),
                             doctest::Contains("mixed definitions"), ValidationError);
    }
    SUBCASE("empty table") {
        CHECK_THROWS_AS(parse_threshold_table(header, "t"), ValidationError);
    }
}

TEST_CASE("classification boundary follows the inclusive cutoff") {
    const auto table = load_threshold_table(data_path("thresholds_hud_very_low_2017.csv"));
    CHECK(classify(obs(kNyc, 4, 47700.0), table) == IncomeClass::low_income);
    CHECK(classify(obs(kNyc, 4, 47701.0), table) == IncomeClass::not_low_income);
    CHECK(classify(obs(kNyc, 4, 0.0), table) == IncomeClass::low_income);
    CHECK(classify(obs("36001", 2, 0.0), table) == IncomeClass::low_income);
}

TEST_CASE("oversize households clamp to the largest tabulated size") {
    const auto table = load_threshold_table(data_path("thresholds_hud_very_low_2017.csv"));
    CHECK(table.cutoff(kNyc, 11) == table.cutoff(kNyc, 8));
    CHECK(table.cutoff(kNyc, 8) > table.cutoff(kNyc, 1));
}

TEST_CASE("unknown regions fall back to the default rows or fail loudly") {
    const std::string header = "definition,region_code,household_size,cutoff_usd\n";
    SUBCASE("with a default region") {
        const auto table =
            parse_threshold_table(header + "d,36061,1,30000\nd,*,1,20000\nd,*,2,22000\n", "t");
        CHECK(table.cutoff("99999", 1) == doctest::Approx(20000.0));
        CHECK(table.cutoff("99999", 5) == doctest::Approx(22000.0)); // clamp within default rows
        CHECK(table.cutoff("36061", 1) == doctest::Approx(30000.0));
    }
    SUBCASE("without a default region the region code is named") {
        const auto table = parse_threshold_table(header + "d,36061,1,30000\n", "t");
        CHECK_THROWS_WITH_AS(table.cutoff("99999", 1), doctest::Contains("99999"), ValidationError);
    }
}

TEST_CASE("bracket representation rules") {
    const auto map = load_bracket_map(data_path("brackets_nhts2017.csv"));

    SUBCASE("midpoint by default") {
        CHECK(map.representative("04") == doctest::Approx(29999.5)); // [25000, 34999]
    }
    SUBCASE("open top bracket uses its lower bound") {
        CHECK(map.representative("11") == doctest::Approx(200000.0));
    }
    SUBCASE("unknown bracket id") {
        CHECK_THROWS_AS(map.representative("42"), ValidationError);
    }
    SUBCASE("exact incomes pass through untouched") {
        CHECK(representative_income(IncomeObservation{"r", 1, 30000.0}, &map) ==
              doctest::Approx(30000.0));
        CHECK(representative_income(IncomeObservation{"r", 1, 30000.0}, nullptr) ==
              doctest::Approx(30000.0));
    }
    SUBCASE("bracketed income without a map is an error") {
        CHECK_THROWS_AS(representative_income(IncomeObservation{"r", 1, std::string("04")}, nullptr),
                        ValidationError);
    }
    SUBCASE("lower and upper rules") {
        const std::string csv = "bracket_id,lower_usd,upper_usd\nb,100,200\n";
        CHECK(parse_bracket_map(csv, "t", RepresentativeRule::lower).representative("b") == 100.0);
        CHECK(parse_bracket_map(csv, "t", RepresentativeRule::upper).representative("b") == 200.0);
    }
}

TEST_CASE("bracket map structural validation") {
    const std::string header = "bracket_id,lower_usd,upper_usd\n";
    CHECK_THROWS_AS(parse_bracket_map(header + "a,0,5000\nb,4000,9000\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_bracket_map(header + "a,0,\nb,10000,20000\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_bracket_map(header + "a,0,100\na,200,300\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_bracket_map(header + "a,500,100\n", "t"), ValidationError);
}

TEST_CASE("bracketed NHTS incomes classify against dollar cutoffs") {
    const auto table = load_threshold_table(data_path("thresholds_hud_very_low_2017.csv"));
    const auto map = load_bracket_map(data_path("brackets_nhts2017.csv"));
    // Bracket 05 is [35000, 49999]; midpoint 42499.5 sits under the NYC
    // 4-person cutoff of 47700.
    CHECK(classify(IncomeObservation{kNyc, 4, std::string("05")}, table, &map) ==
          IncomeClass::low_income);
    CHECK(classify(IncomeObservation{kNyc, 4, std::string("07")}, table, &map) ==
          IncomeClass::not_low_income);
}

TEST_CASE("classification is monotone in income") {
    const auto table = load_threshold_table(data_path("thresholds_hud_very_low_2017.csv"));
    Rng rng(321);
    const std::vector<std::string> regions{kNyc, "36001", "36003", "36097"};
    for (int trial = 0; trial < 500; ++trial) {
        const auto& region = regions[rng.bounded(regions.size())];
        const int size = 1 + static_cast<int>(rng.bounded(8));
        double lo = rng.uniform(0.0, 150000.0);
        double hi = rng.uniform(0.0, 150000.0);
        if (lo > hi) {
            std::swap(lo, hi);
        }
        if (classify(obs(region, size, lo), table) == IncomeClass::not_low_income) {
            CHECK(classify(obs(region, size, hi), table) == IncomeClass::not_low_income);
        }
    }
}

TEST_CASE("the 80% table flags a superset of the 50% table") {
    const auto very_low = load_threshold_table(data_path("thresholds_hud_very_low_2017.csv"));
    const auto low = load_threshold_table(data_path("thresholds_hud_low_2017.csv"));

    Rng rng(17);
    const std::vector<std::string> regions{kNyc, "36005", "36001", "36067", "36003", "36121"};
    bool any_difference = false;
    for (int trial = 0; trial < 2000; ++trial) {
        const auto& region = regions[rng.bounded(regions.size())];
        const int size = 1 + static_cast<int>(rng.bounded(9));
        const double income = rng.uniform(0.0, 120000.0);
        const auto o = obs(region, size, income);
        if (classify(o, very_low) == IncomeClass::low_income) {
            CHECK(classify(o, low) == IncomeClass::low_income);
        } else if (classify(o, low) == IncomeClass::low_income) {
            any_difference = true;
        }
    }
    CHECK(any_difference); // strictly more households flagged at 80%
}

TEST_CASE("household size below one is rejected") {
    const auto table = load_threshold_table(data_path("thresholds_hud_very_low_2017.csv"));
    CHECK_THROWS_AS(table.cutoff(kNyc, 0), ValidationError);
}
