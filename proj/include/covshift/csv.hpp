#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covshift::csv {

/// Shortest round-trip-safe decimal text ("%.17g" trimmed), empty for NaN.
std::string number(double v);

std::string escape(const std::string& field);

/// RFC 4180 writer: comma separated, CRLF-free ("\n") line endings,
/// fields quoted only when needed.
class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or -1.
    int column(const std::string& name) const;
};

/// Parses a CSV document with a mandatory header row. Quoted fields may
/// contain commas, doubled quotes and newlines.
Table read(std::istream& in);
Table read_file(const std::string& path);

void write_file(const std::string& path, const std::string& contents);

}  // namespace covshift::csv
