#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mobgap {

enum class IncomeClass { low_income, not_low_income };

// Either exact annual USD or a survey bracket id.
using IncomeValue = std::variant<double, std::string>;

struct IncomeObservation {
    std::string region_code;
    int household_size = 1;
    IncomeValue income;
};

// (region, household size) -> annual income cutoff, keyed to one named
// low-income definition. Cutoffs must be positive and non-decreasing in
// household size within a region. A region row coded "*" acts as the default
// for unmatched geographies.
class ThresholdTable {
  public:
    static constexpr const char* kDefaultRegion = "*";

    ThresholdTable(std::string definition_name,
                   std::map<std::string, std::map<int, double>> entries);

    const std::string& definition_name() const { return definition_name_; }
    bool has_default_region() const { return entries_.count(kDefaultRegion) > 0; }
    const std::map<std::string, std::map<int, double>>& entries() const { return entries_; }

    // Cutoff for (region, size); sizes above a region's largest listed size
    // clamp to that largest row. Unknown regions fall back to the "*" rows
    // when present, otherwise throw ValidationError naming the region.
    double cutoff(const std::string& region_code, int household_size) const;

  private:
    std::string definition_name_;
    std::map<std::string, std::map<int, double>> entries_;
};

// CSV rows: definition,region_code,household_size,cutoff_usd. All rows must
// carry the same definition name.
ThresholdTable load_threshold_table(const std::filesystem::path& path);
ThresholdTable parse_threshold_table(std::string_view csv_text, const std::string& origin);

enum class RepresentativeRule { midpoint, lower, upper };

struct Bracket {
    std::string id;
    double lower = 0.0;
    std::optional<double> upper; // nullopt = open-ended top bracket
};

// Ordered, non-overlapping income brackets with a rule mapping each bracket
// to a representative dollar value. An open top bracket always represents as
// its lower bound.
class BracketMap {
  public:
    BracketMap(std::vector<Bracket> brackets, RepresentativeRule rule);

    const std::vector<Bracket>& brackets() const { return brackets_; }
    RepresentativeRule rule() const { return rule_; }

    // Representative income for a bracket id; throws ValidationError for
    // unknown ids.
    double representative(const std::string& bracket_id) const;

  private:
    std::vector<Bracket> brackets_;
    std::map<std::string, std::size_t> index_;
    RepresentativeRule rule_;
};

// CSV rows: bracket_id,lower_usd,upper_usd (empty upper = open).
BracketMap load_bracket_map(const std::filesystem::path& path,
                            RepresentativeRule rule = RepresentativeRule::midpoint);
BracketMap parse_bracket_map(std::string_view csv_text, const std::string& origin,
                             RepresentativeRule rule = RepresentativeRule::midpoint);

// Exact incomes pass through; bracket ids map through the bracket map
// (required in that case).
double representative_income(const IncomeObservation& obs, const BracketMap* map);

// low_income iff the representative income does not exceed the cutoff for the
// observation's region and size.
IncomeClass classify(const IncomeObservation& obs, const ThresholdTable& table,
                     const BracketMap* map = nullptr);

} // namespace mobgap
