#pragma once

#include "mobgap/income.hpp"
#include "mobgap/schema.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mobgap {

struct HouseholdRecord {
    std::string household_id;
    int size = 1;
    int vehicle_count = 0;
    int driver_count = 0;
    IncomeValue income;
    std::string race_code;
    std::string region_code;
    bool urban = true;
    double hh_weight = 1.0;
};

enum class Sex { male, female, unknown };

struct PersonRecord {
    std::string household_id;
    std::string person_id;
    int age = 0;
    Sex sex = Sex::unknown;
    bool worker = false;
    int education_code = 0;
    double person_weight = 1.0;
};

struct TripRecord {
    std::string household_id;
    std::string person_id;
    std::string trip_id;
    double distance_miles = 0.0;
    double duration_minutes = 0.0;
    std::string mode_code;
    double trip_weight = 1.0;
};

// Logical field -> source column names. Defaults follow the NHTS 2017 public
// codebook; everything is remappable through a JSON document of the form
// {"household": {...}, "person": {...}, "trip": {...}, "income_kind": "bracket"}.
struct ColumnMap {
    std::map<std::string, std::string> household;
    std::map<std::string, std::string> person;
    std::map<std::string, std::string> trip;
    // "bracket" stores the raw income code for bracket-map lookup; "exact"
    // parses the column as annual USD.
    std::string income_kind = "bracket";

    static ColumnMap nhts2017();
    static ColumnMap from_json_text(const std::string& text, const std::string& origin);
    static ColumnMap from_json_file(const std::filesystem::path& path);
};

enum class LoadMode { strict, lenient };

struct LoadIssue {
    std::string file;
    std::size_t row = 0; // 1-based data row (header excluded)
    std::string message;
};

struct LoadDiagnostics {
    std::size_t households_read = 0, households_kept = 0;
    std::size_t persons_read = 0, persons_kept = 0;
    std::size_t trips_read = 0, trips_kept = 0;
    std::vector<LoadIssue> issues;
};

// Validated, referentially intact survey extract. Index vectors are built at
// load time; the store is immutable afterwards.
struct SurveyStore {
    std::vector<HouseholdRecord> households;
    std::vector<PersonRecord> persons;
    std::vector<TripRecord> trips;
    std::vector<std::vector<std::size_t>> persons_of_household; // household idx -> person idxs
    std::vector<std::vector<std::size_t>> trips_of_person;      // person idx -> trip idxs
    LoadDiagnostics diagnostics;

    std::size_t household_index(const std::string& household_id) const;

  private:
    friend SurveyStore load_survey(const std::filesystem::path&, const std::filesystem::path&,
                                   const std::filesystem::path&, const ColumnMap&, LoadMode);
    std::map<std::string, std::size_t> household_by_id_;
};

// Parses the three CSV extracts, enforces referential integrity
// (persons -> households, trips -> persons) and value sanity (non-negative
// weights, distances, durations). strict mode throws on the first bad row;
// lenient mode drops the row and records a diagnostic.
SurveyStore load_survey(const std::filesystem::path& household_csv,
                        const std::filesystem::path& person_csv,
                        const std::filesystem::path& trip_csv, const ColumnMap& columns,
                        LoadMode mode = LoadMode::strict);

// region_code -> NYC membership. Codes absent from the map are not NYC.
class GeographyMap {
  public:
    GeographyMap() = default;
    explicit GeographyMap(std::set<std::string> nyc_codes) : nyc_codes_(std::move(nyc_codes)) {}

    static GeographyMap load(const std::filesystem::path& path);
    bool is_nyc(const std::string& region_code) const { return nyc_codes_.count(region_code) > 0; }

  private:
    std::set<std::string> nyc_codes_;
};

enum class Location { nyc, other_urban, rural };
enum class ElderlyStatus { elderly, non_elderly };
enum class RaceGroup { white, non_white };
enum class EmploymentStatus { working, non_working };
enum class EducationStatus { higher, lower };
enum class GenderBalance { males_lt_females, males_eq_females, males_gt_females };
enum class VehicleDriverBalance { veh_lt_drv, veh_eq_drv, veh_gt_drv };

// The nine socio-demographic household variables: two numeric, seven
// categorical.
struct HouseholdFeatures {
    double size = 0.0;
    double vehicle_count = 0.0;
    Location location = Location::other_urban;
    ElderlyStatus elderly = ElderlyStatus::non_elderly;
    RaceGroup race = RaceGroup::white;
    EmploymentStatus employment = EmploymentStatus::non_working;
    EducationStatus education = EducationStatus::lower;
    GenderBalance gender_balance = GenderBalance::males_eq_females;
    VehicleDriverBalance vehicle_driver_balance = VehicleDriverBalance::veh_eq_drv;

    bool operator==(const HouseholdFeatures&) const = default;
};

struct DeriveOptions {
    // Education codes at or above this count as a college-or-higher degree
    // (NHTS 2017 EDUC: 4 = Bachelor's).
    int college_education_code = 4;
    std::string white_race_code = "01";
};

// A household is elderly when any member is 65 or older.
inline constexpr int kElderlyAge = 65;

// Derives the nine features for one household. Members with unknown sex are
// excluded from the gender-balance counts. Throws ValidationError for a
// household with no person records.
HouseholdFeatures derive_features(const HouseholdRecord& household,
                                  const std::vector<const PersonRecord*>& members,
                                  const GeographyMap& geography,
                                  const DeriveOptions& options = DeriveOptions{});

// Store-wide convenience wrapper, household order preserved.
std::vector<HouseholdFeatures> derive_all_features(const SurveyStore& store,
                                                   const GeographyMap& geography,
                                                   const DeriveOptions& options = DeriveOptions{});

// The canonical clustering schema: hh_size, vehicle_count, then the seven
// categorical variables with levels in declaration order.
const FeatureSchema& household_feature_schema();

// Adapter to the clustering engine's representation; column order follows
// household_feature_schema().
std::vector<FeatureVector> to_feature_matrix(const std::vector<HouseholdFeatures>& features);

// Income observation for classification (region, size, income).
IncomeObservation make_income_observation(const HouseholdRecord& household);

// Level labels, in category-index order, per categorical variable.
const char* to_string(Location v);
const char* to_string(ElderlyStatus v);
const char* to_string(RaceGroup v);
const char* to_string(EmploymentStatus v);
const char* to_string(EducationStatus v);
const char* to_string(GenderBalance v);
const char* to_string(VehicleDriverBalance v);

} // namespace mobgap
