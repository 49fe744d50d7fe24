#include "avgdiff/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "avgdiff/errors.hpp"

namespace avgdiff {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_cell(const CsvCell& cell) {
    if (const auto* i = std::get_if<Index>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return std::get<std::string>(cell);
}

namespace {

std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string csv_to_string(const std::vector<std::string>& header, const std::vector<CsvRow>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += escape(header[i]);
    }
    out += '\n';
    for (const CsvRow& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += escape(format_cell(row[i]));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
               const std::string& path) {
    write_text(csv_to_string(header, rows), path);
}

void write_text(const std::string& text, const std::string& path) {
    std::error_code ec;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace avgdiff
