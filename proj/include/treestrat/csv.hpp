#pragma once

#include <string>
#include <vector>

namespace treestrat::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 if absent
};

Table parse(const std::string& text);
Table read_file(const std::string& path);

std::string to_string(const Table& table);
void write_file(const std::string& path, const Table& table);

/// Shortest round-trip formatting used for every numeric artifact, so reruns
/// are byte-identical.
std::string format_double(double v);
double parse_double(const std::string& field, const std::string& context);

} // namespace treestrat::csv
