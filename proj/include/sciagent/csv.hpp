#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sciagent/error.hpp"

namespace sciagent::csv {

struct ParseError : Error {
    using Error::Error;
};

// Raw numeric table: header row + double-valued rows. "nan"/"inf" tokens are
// parsed into the corresponding IEEE values so graders can see them.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table read_table(const std::filesystem::path& file);
Table parse_table(const std::string& text);

// Solution artifact layouts. Headers are fixed:
//   1D field  "x,value"
//   2D field  "x,y,value" (row-major grid order)
//   vector    "index,value"
enum class ArtifactKind { field_1d, field_2d, vector };

struct Artifact {
    ArtifactKind kind;
    std::vector<double> x;      // 1D/2D
    std::vector<double> y;      // 2D only
    std::vector<double> value;  // all kinds
};

Artifact read_artifact(const std::filesystem::path& file);

void write_artifact_1d(const std::filesystem::path& file, const std::vector<double>& x,
                       const std::vector<double>& value);
void write_artifact_2d(const std::filesystem::path& file, const std::vector<double>& x,
                       const std::vector<double>& y, const std::vector<double>& value);
void write_artifact_vector(const std::filesystem::path& file, const std::vector<double>& value);

// Shortest-round-trip decimal text with '.' radix point.
std::string format_double(double v);

}  // namespace sciagent::csv
