#include "ltuprof/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>

namespace ltuprof {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in_, line)) throw DataError(path + ": empty file, header expected");
    line_ = 1;
    header_ = split_csv_line(line);
}

std::size_t CsvReader::col(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) {
        throw DataError(path_ + ": missing required column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header_.begin());
}

bool CsvReader::has_col(const std::string& name) const {
    return std::find(header_.begin(), header_.end(), name) != header_.end();
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (line.empty() || line == "\r") continue;
        fields = split_csv_line(line);
        return true;
    }
    return false;
}

void CsvReader::require_header(const std::vector<std::string>& expect) const {
    if (header_ != expect) {
        std::string want, got;
        for (const auto& h : expect) want += (want.empty() ? "" : ",") + h;
        for (const auto& h : header_) got += (got.empty() ? "" : ",") + h;
        throw DataError(path_ + ": header mismatch, expected '" + want + "', got '" + got + "'");
    }
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw DataError("cannot write " + path);
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_.put(',');
        out_ << fields[i];
    }
    out_.put('\n');
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw DataError("write failed for " + path_);
}

int parse_int_field(const std::string& s, const std::string& what, std::size_t line) {
    if (s.empty()) throw DataError("line " + std::to_string(line) + ": empty " + what);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) {
        throw DataError("line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
    }
    return static_cast<int>(v);
}

double parse_double_field(const std::string& s, const std::string& what, std::size_t line) {
    if (s.empty()) throw DataError("line " + std::to_string(line) + ": empty " + what);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size()) {
        throw DataError("line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
    }
    return v;
}

}  // namespace ltuprof
