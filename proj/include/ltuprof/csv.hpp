#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ltuprof/common.hpp"

namespace ltuprof {

// Minimal CSV layer for the pipeline's file handoffs. Fields never contain
// commas or quotes in our schemas, but quoted fields are accepted on read.
class CsvReader {
  public:
    explicit CsvReader(const std::string& path);

    const std::vector<std::string>& header() const { return header_; }
    // Index of a required column; throws DataError naming the column.
    std::size_t col(const std::string& name) const;
    bool has_col(const std::string& name) const;

    // Reads next row into fields; returns false at EOF. line_number() refers
    // to the physical line of the row just read (header is line 1).
    bool next(std::vector<std::string>& fields);
    std::size_t line_number() const { return line_; }
    const std::string& path() const { return path_; }

    // Throws DataError unless the header is exactly `expect`.
    void require_header(const std::vector<std::string>& expect) const;

  private:
    std::string path_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    void write_row(const std::vector<std::string>& fields);
    void close();

  private:
    std::ofstream out_;
    std::string path_;
};

std::vector<std::string> split_csv_line(const std::string& line);

// Field parsing helpers; empty string means missing where allowed.
int parse_int_field(const std::string& s, const std::string& what, std::size_t line);
double parse_double_field(const std::string& s, const std::string& what, std::size_t line);

}  // namespace ltuprof
