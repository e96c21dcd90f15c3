#include "dlmo/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "dlmo/errors.hpp"

namespace dlmo::csv {

std::size_t Table::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw ParseError(path_.string(), 1, "missing required column '" + name + "'");
    return it->second;
}

const std::string& Table::field(const Row& row, std::size_t col) const {
    static const std::string empty;
    if (col >= row.fields.size()) return empty;
    return row.fields[col];
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    // Trim trailing CR from CRLF files.
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string(), 1, "empty file, header row required");
    std::vector<std::string> header = split_line(line);
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Row r;
        r.line = lineno;
        r.fields = split_line(line);
        if (r.fields.size() > header.size())
            throw ParseError(path.string(), lineno, "row has more fields than header");
        rows.push_back(std::move(r));
    }
    return Table(path, std::move(header), std::move(rows));
}

double parse_double(const std::string& s, const std::filesystem::path& file,
                    std::size_t line) {
    if (s.empty()) throw ParseError(file.string(), line, "expected a number, got empty field");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError(file.string(), line, "malformed number '" + s + "'");
    return v;
}

long long parse_int(const std::string& s, const std::filesystem::path& file,
                    std::size_t line) {
    if (s.empty()) throw ParseError(file.string(), line, "expected an integer, got empty field");
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError(file.string(), line, "malformed integer '" + s + "'");
    return v;
}

std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double quantize_g9(double v) {
    return std::strtod(format_g9(v).c_str(), nullptr);
}

Writer::Writer(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::trunc);
    if (!out_) throw IoError("cannot write " + path.string());
}

void Writer::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void Writer::close() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_.string());
    out_.close();
}

}  // namespace dlmo::csv
