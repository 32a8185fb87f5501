#include "mobgap/schema.hpp"

#include "mobgap/errors.hpp"
#include "mobgap/util.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

namespace mobgap {

FeatureSchema::FeatureSchema(std::vector<Column> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) {
        throw ValidationError("schema needs at least one column");
    }
    std::unordered_set<std::string> names;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const Column& col = columns_[i];
        if (!names.insert(col.name).second) {
            throw ValidationError("duplicate column name: " + col.name);
        }
        if (col.kind == ColumnKind::numeric) {
            if (!col.categories.empty()) {
                throw ValidationError("numeric column '" + col.name + "' lists categories");
            }
            numeric_cols_.push_back(i);
        } else {
            if (col.categories.empty()) {
                throw ValidationError("categorical column '" + col.name + "' lists no categories");
            }
            categorical_cols_.push_back(i);
        }
    }
}

void FeatureSchema::validate(const FeatureVector& v) const {
    if (v.numeric.size() != numeric_count() || v.categorical.size() != categorical_count()) {
        throw ValidationError("feature vector shape (" + std::to_string(v.numeric.size()) + " numeric, " +
                              std::to_string(v.categorical.size()) + " categorical) does not match schema (" +
                              std::to_string(numeric_count()) + ", " + std::to_string(categorical_count()) + ")");
    }
    for (std::size_t j = 0; j < v.numeric.size(); ++j) {
        if (!std::isfinite(v.numeric[j])) {
            throw ValidationError("non-finite value in numeric column '" + numeric_column(j).name + "'");
        }
    }
    for (std::size_t j = 0; j < v.categorical.size(); ++j) {
        const Column& col = categorical_column(j);
        if (v.categorical[j] < 0 || static_cast<std::size_t>(v.categorical[j]) >= col.categories.size()) {
            throw ValidationError("category index " + std::to_string(v.categorical[j]) +
                                  " out of range for column '" + col.name + "'");
        }
    }
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
    return columns_ == other.columns_;
}

std::size_t FeatureVectorHash::operator()(const FeatureVector& v) const {
    std::uint64_t h = 0x243F6A8885A308D3ull;
    for (double x : v.numeric) {
        if (x == 0.0) {
            x = 0.0; // fold -0.0 onto +0.0 so equal vectors hash equal
        }
        std::uint64_t bits = 0;
        std::memcpy(&bits, &x, sizeof(bits));
        h = splitmix64(h ^ bits);
    }
    for (const std::int32_t c : v.categorical) {
        h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)));
    }
    return static_cast<std::size_t>(h);
}

} // namespace mobgap
