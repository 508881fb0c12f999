#include "od/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace od {

CsvReader::CsvReader(const std::string& path, std::string_view header)
    : path_(path), in_(path) {
    if (!in_)
        throw std::runtime_error("cannot open " + path);
    std::string first;
    if (!std::getline(in_, first))
        throw std::runtime_error(path + ": empty file, expected header '" + std::string(header) + "'");
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first != header)
        throw std::runtime_error(path + ": header '" + first + "' does not match expected '" +
                                 std::string(header) + "'");
    n_cols_ = split(header, ',').size();
    line_ = 1;
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string row;
    while (std::getline(in_, row)) {
        ++line_;
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (row.empty()) continue;
        fields = split(row, ',');
        if (fields.size() != n_cols_)
            fail("expected " + std::to_string(n_cols_) + " fields, got " +
                 std::to_string(fields.size()));
        return true;
    }
    return false;
}

void CsvReader::fail(const std::string& what) const {
    throw std::runtime_error(path_ + ":" + std::to_string(line_) + ": " + what);
}

std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

long long parse_int(const std::string& field, const CsvReader& ctx) {
    long long v = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size())
        ctx.fail("not an integer: '" + field + "'");
    return v;
}

double parse_double(const std::string& field, const CsvReader& ctx) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size())
        ctx.fail("not a number: '" + field + "'");
    return v;
}

bool parse_bool01(const std::string& field, const CsvReader& ctx) {
    if (field == "0") return false;
    if (field == "1") return true;
    ctx.fail("expected 0 or 1, got '" + field + "'");
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot create " + path);
    return out;
}

} // namespace od
