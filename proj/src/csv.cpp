#include "mobgap/csv.hpp"

#include "mobgap/errors.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mobgap::csv {

namespace {

std::vector<std::vector<std::string>> parse_records(std::string_view text, const std::string& origin) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any_char = false;

    const auto end_field = [&]() {
        fields.push_back(std::move(field));
        field.clear();
    };
    const auto end_record = [&]() {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
        any_char = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            any_char = true;
            break;
        case ',':
            end_field();
            any_char = true;
            break;
        case '\r':
            break;
        case '\n':
            if (any_char || !field.empty() || !fields.empty()) {
                end_record();
            }
            break;
        default:
            field.push_back(c);
            any_char = true;
            break;
        }
    }
    if (in_quotes) {
        throw ValidationError(origin + ": unterminated quoted field");
    }
    if (any_char || !field.empty() || !fields.empty()) {
        end_record();
    }
    return records;
}

} // namespace

Table::Table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
    : header_(std::move(header)), rows_(std::move(rows)) {
    for (const auto& row : rows_) {
        if (row.size() != header_.size()) {
            throw ValidationError("csv row width does not match header");
        }
    }
}

Table Table::read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open csv file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

Table Table::parse(std::string_view text, const std::string& origin) {
    auto records = parse_records(text, origin);
    if (records.empty()) {
        throw ValidationError(origin + ": csv file has no header row");
    }
    Table t;
    t.header_ = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header_.size()) {
            throw ValidationError(origin + ": row " + std::to_string(r) + " has " +
                                  std::to_string(records[r].size()) + " fields, header has " +
                                  std::to_string(t.header_.size()));
        }
        t.rows_.push_back(std::move(records[r]));
    }
    return t;
}

std::size_t Table::column(const std::string& name) const {
    const auto found = find_column(name);
    if (!found) {
        throw ValidationError("csv column not found: " + name);
    }
    return *found;
}

std::optional<std::size_t> Table::find_column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

void Table::append_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
        throw ValidationError("csv row width does not match header");
    }
    rows_.push_back(std::move(row));
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string Table::to_string() const {
    std::string out;
    const auto write_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out.push_back(',');
            }
            out += escape(row[i]);
        }
        out.push_back('\n');
    };
    write_row(header_);
    for (const auto& row : rows_) {
        write_row(row);
    }
    return out;
}

void Table::write_file(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write csv file: " + path.string());
    }
    out << to_string();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

double parse_double(const std::string& text, const std::string& context) {
    if (text.empty()) {
        throw ValidationError(context + ": empty numeric field");
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw ValidationError(context + ": not a number: '" + text + "'");
    }
    return v;
}

long long parse_int(const std::string& text, const std::string& context) {
    if (text.empty()) {
        throw ValidationError(context + ": empty integer field");
    }
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw ValidationError(context + ": not an integer: '" + text + "'");
    }
    return v;
}

} // namespace mobgap::csv
