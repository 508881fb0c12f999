#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace od {

/// Line-oriented reader for the delimited text files used throughout the
/// pipeline. Fields never contain the delimiter, so no quoting is supported.
class CsvReader {
public:
    /// Opens `path` and checks that the first line equals `header`.
    CsvReader(const std::string& path, std::string_view header);

    /// Reads the next data row into `fields`. Returns false at end of file.
    /// Blank lines are skipped. Throws when the column count differs from the
    /// header's.
    bool next(std::vector<std::string>& fields);

    /// 1-based line number of the row last returned (for error messages).
    long line() const { return line_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const;

private:
    std::string path_;
    std::ifstream in_;
    size_t n_cols_;
    long line_ = 0;
};

std::vector<std::string> split(std::string_view line, char delim);

long long parse_int(const std::string& field, const CsvReader& ctx);
double parse_double(const std::string& field, const CsvReader& ctx);
bool parse_bool01(const std::string& field, const CsvReader& ctx);

/// Shortest round-trip decimal form of v (std::to_chars), so rewriting a
/// checkpoint never loses precision and output files are byte-stable.
std::string format_double(double v);

/// Output stream that creates the file and fails loudly.
std::ofstream open_output(const std::string& path);

} // namespace od
