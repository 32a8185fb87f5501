#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mobgap::csv {

// In-memory CSV with a header row. Quoted fields (RFC 4180) are supported on
// read; writes quote only when needed. Cell addressing is by header name.
class Table {
  public:
    Table() = default;
    Table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

    static Table read_file(const std::filesystem::path& path);
    static Table parse(std::string_view text, const std::string& origin = "<string>");

    const std::vector<std::string>& header() const { return header_; }
    std::size_t row_count() const { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

    // Column index for a header name; throws ValidationError when absent.
    std::size_t column(const std::string& name) const;
    std::optional<std::size_t> find_column(const std::string& name) const;

    const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }

    void append_row(std::vector<std::string> row);
    std::string to_string() const;
    void write_file(const std::filesystem::path& path) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Field-level parsers with row context in the error message.
double parse_double(const std::string& text, const std::string& context);
long long parse_int(const std::string& text, const std::string& context);

std::string escape(const std::string& field);

} // namespace mobgap::csv
