#include "mobgap/income.hpp"

#include "mobgap/csv.hpp"
#include "mobgap/errors.hpp"

namespace mobgap {

ThresholdTable::ThresholdTable(std::string definition_name,
                               std::map<std::string, std::map<int, double>> entries)
    : definition_name_(std::move(definition_name)), entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw ValidationError("threshold table '" + definition_name_ + "' has no entries");
    }
    for (const auto& [region, by_size] : entries_) {
        double prev = 0.0;
        for (const auto& [size, cutoff] : by_size) {
            if (size < 1) {
                throw ValidationError("threshold table: household size below 1 in region " + region);
            }
            if (cutoff <= 0.0) {
                throw ValidationError("threshold table: non-positive cutoff for region " + region +
                                      ", size " + std::to_string(size));
            }
            if (cutoff < prev) {
                throw ValidationError("threshold table: cutoff decreases with household size in region " +
                                      region + " at size " + std::to_string(size));
            }
            prev = cutoff;
        }
    }
}

double ThresholdTable::cutoff(const std::string& region_code, int household_size) const {
    if (household_size < 1) {
        throw ValidationError("household size must be at least 1");
    }
    auto it = entries_.find(region_code);
    if (it == entries_.end()) {
        it = entries_.find(kDefaultRegion);
        if (it == entries_.end()) {
            throw ValidationError("no income threshold for region '" + region_code +
                                  "' and no default region in table '" + definition_name_ + "'");
        }
    }
    const auto& by_size = it->second;
    auto sit = by_size.find(household_size);
    if (sit == by_size.end()) {
        // Oversize households clamp to the largest tabulated size.
        const int max_size = by_size.rbegin()->first;
        if (household_size > max_size) {
            sit = by_size.find(max_size);
        } else {
            throw ValidationError("no cutoff for household size " + std::to_string(household_size) +
                                  " in region '" + it->first + "' of table '" + definition_name_ + "'");
        }
    }
    return sit->second;
}

ThresholdTable parse_threshold_table(std::string_view csv_text, const std::string& origin) {
    const auto table = csv::Table::parse(csv_text, origin);
    const std::size_t c_def = table.column("definition");
    const std::size_t c_region = table.column("region_code");
    const std::size_t c_size = table.column("household_size");
    const std::size_t c_cutoff = table.column("cutoff_usd");

    std::string definition;
    std::map<std::string, std::map<int, double>> entries;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const std::string ctx = origin + " row " + std::to_string(r + 2);
        const std::string& def = table.cell(r, c_def);
        if (definition.empty()) {
            definition = def;
        } else if (def != definition) {
            throw ValidationError(ctx + ": mixed definitions in one table ('" + definition + "' vs '" +
                                  def + "')");
        }
        const std::string& region = table.cell(r, c_region);
        const int size = static_cast<int>(csv::parse_int(table.cell(r, c_size), ctx));
        const double cutoff = csv::parse_double(table.cell(r, c_cutoff), ctx);
        auto [it, inserted] = entries[region].emplace(size, cutoff);
        if (!inserted) {
            throw ValidationError(ctx + ": duplicate entry for region '" + region + "', size " +
                                  std::to_string(size));
        }
    }
    if (definition.empty()) {
        throw ValidationError(origin + ": threshold table has no rows");
    }
    return ThresholdTable(definition, std::move(entries));
}

ThresholdTable load_threshold_table(const std::filesystem::path& path) {
    const auto table = csv::Table::read_file(path);
    return parse_threshold_table(table.to_string(), path.string());
}

BracketMap::BracketMap(std::vector<Bracket> brackets, RepresentativeRule rule)
    : brackets_(std::move(brackets)), rule_(rule) {
    if (brackets_.empty()) {
        throw ValidationError("bracket map has no brackets");
    }
    for (std::size_t i = 0; i < brackets_.size(); ++i) {
        const Bracket& b = brackets_[i];
        if (b.lower < 0.0) {
            throw ValidationError("bracket '" + b.id + "' has negative lower bound");
        }
        if (b.upper.has_value() && *b.upper < b.lower) {
            throw ValidationError("bracket '" + b.id + "' has upper bound below lower bound");
        }
        if (!b.upper.has_value() && i + 1 != brackets_.size()) {
            throw ValidationError("open-ended bracket '" + b.id + "' must be last");
        }
        if (i > 0) {
            const Bracket& prev = brackets_[i - 1];
            if (!prev.upper.has_value() || b.lower <= *prev.upper) {
                throw ValidationError("brackets '" + prev.id + "' and '" + b.id +
                                      "' overlap or are out of order");
            }
        }
        if (!index_.emplace(b.id, i).second) {
            throw ValidationError("duplicate bracket id '" + b.id + "'");
        }
    }
}

double BracketMap::representative(const std::string& bracket_id) const {
    const auto it = index_.find(bracket_id);
    if (it == index_.end()) {
        throw ValidationError("unknown income bracket id '" + bracket_id + "'");
    }
    const Bracket& b = brackets_[it->second];
    if (!b.upper.has_value()) {
        return b.lower; // open top bracket always uses its lower bound
    }
    switch (rule_) {
    case RepresentativeRule::lower:
        return b.lower;
    case RepresentativeRule::upper:
        return *b.upper;
    case RepresentativeRule::midpoint:
        break;
    }
    return 0.5 * (b.lower + *b.upper);
}

BracketMap parse_bracket_map(std::string_view csv_text, const std::string& origin,
                             RepresentativeRule rule) {
    const auto table = csv::Table::parse(csv_text, origin);
    const std::size_t c_id = table.column("bracket_id");
    const std::size_t c_lower = table.column("lower_usd");
    const std::size_t c_upper = table.column("upper_usd");

    std::vector<Bracket> brackets;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const std::string ctx = origin + " row " + std::to_string(r + 2);
        Bracket b;
        b.id = table.cell(r, c_id);
        b.lower = csv::parse_double(table.cell(r, c_lower), ctx);
        const std::string& upper = table.cell(r, c_upper);
        if (!upper.empty()) {
            b.upper = csv::parse_double(upper, ctx);
        }
        brackets.push_back(std::move(b));
    }
    return BracketMap(std::move(brackets), rule);
}

BracketMap load_bracket_map(const std::filesystem::path& path, RepresentativeRule rule) {
    const auto table = csv::Table::read_file(path);
    return parse_bracket_map(table.to_string(), path.string(), rule);
}

double representative_income(const IncomeObservation& obs, const BracketMap* map) {
    if (std::holds_alternative<double>(obs.income)) {
        const double income = std::get<double>(obs.income);
        if (income < 0.0) {
            throw ValidationError("negative exact income");
        }
        return income;
    }
    if (map == nullptr) {
        throw ValidationError("bracketed income requires a bracket map");
    }
    return map->representative(std::get<std::string>(obs.income));
}

IncomeClass classify(const IncomeObservation& obs, const ThresholdTable& table, const BracketMap* map) {
    const double income = representative_income(obs, map);
    const double cutoff = table.cutoff(obs.region_code, obs.household_size);
    // "Do not exceed" reads as an inclusive boundary.
    return income <= cutoff ? IncomeClass::low_income : IncomeClass::not_low_income;
}

} // namespace mobgap
