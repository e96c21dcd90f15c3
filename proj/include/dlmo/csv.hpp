#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace dlmo::csv {

// Minimal CSV support for the project's file formats: UTF-8, comma
// separated, header row required, no quoting (none of the schemas carry
// embedded commas). Missing values are empty fields.

struct Row {
    std::size_t line = 0;  // 1-based line number in the file
    std::vector<std::string> fields;
};

class Table {
public:
    Table(std::filesystem::path path, std::vector<std::string> header,
          std::vector<Row> rows)
        : path_(std::move(path)), header_(std::move(header)), rows_(std::move(rows)) {
        for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
    }

    const std::filesystem::path& path() const { return path_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<std::string>& header() const { return header_; }
    bool has_column(const std::string& name) const { return index_.count(name) != 0; }

    // Throws ParseError if the column is absent.
    std::size_t column(const std::string& name) const;

    // Field access; empty string means a missing value.
    const std::string& field(const Row& row, std::size_t col) const;

private:
    std::filesystem::path path_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
    std::map<std::string, std::size_t> index_;
};

Table read_file(const std::filesystem::path& path);

std::vector<std::string> split_line(const std::string& line);

// Strict numeric parsing; throws ParseError naming file/line on garbage.
double parse_double(const std::string& s, const std::filesystem::path& file,
                    std::size_t line);
long long parse_int(const std::string& s, const std::filesystem::path& file,
                    std::size_t line);

// Shortest-ish decimal formatting used across all emitted files: 9
// significant digits. Generators quantize through this representation so
// that write -> load round-trips are value-exact.
std::string format_g9(double v);
double quantize_g9(double v);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

}  // namespace dlmo::csv
