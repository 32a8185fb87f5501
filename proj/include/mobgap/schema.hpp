#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mobgap {

enum class ColumnKind { numeric, categorical };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    // Category labels in index order; empty for numeric columns.
    std::vector<std::string> categories;
};

struct FeatureVector;

// Ordered mixed-type column declarations. Numeric and categorical components
// of a FeatureVector follow this schema's numeric/categorical column order.
class FeatureSchema {
  public:
    explicit FeatureSchema(std::vector<Column> columns);

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t numeric_count() const { return numeric_cols_.size(); }
    std::size_t categorical_count() const { return categorical_cols_.size(); }

    // j-th numeric / categorical column (0-based within its kind).
    const Column& numeric_column(std::size_t j) const { return columns_[numeric_cols_[j]]; }
    const Column& categorical_column(std::size_t j) const { return columns_[categorical_cols_[j]]; }

    // Throws ValidationError unless v matches this schema: component lengths,
    // category indices in range, numeric values finite.
    void validate(const FeatureVector& v) const;

    bool operator==(const FeatureSchema& other) const;

  private:
    std::vector<Column> columns_;
    std::vector<std::size_t> numeric_cols_;
    std::vector<std::size_t> categorical_cols_;
};

inline bool operator==(const Column& a, const Column& b) {
    return a.name == b.name && a.kind == b.kind && a.categories == b.categories;
}

// One data point: numeric values and categorical level indices, each in the
// schema's per-kind column order.
struct FeatureVector {
    std::vector<double> numeric;
    std::vector<std::int32_t> categorical;

    bool operator==(const FeatureVector& other) const = default;
};

// Bit-pattern hash for exact-equality containers (distinctness checks).
struct FeatureVectorHash {
    std::size_t operator()(const FeatureVector& v) const;
};

} // namespace mobgap
