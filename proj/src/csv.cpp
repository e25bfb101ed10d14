#include "sciagent/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sciagent::csv {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(pos)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

double parse_double(const std::string& tok, std::size_t line_no) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + tok + "'");
    }
    return v;
}

}  // namespace

Table parse_table(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (t.header.empty()) {
            t.header = split_fields(stripped);
            continue;
        }
        auto fields = split_fields(stripped);
        if (fields.size() != t.header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, line_no));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw ParseError("empty table: no header row");
    return t;
}

Table read_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str());
}

Artifact read_artifact(const std::filesystem::path& file) {
    Table t = read_table(file);
    Artifact a;
    auto header_is = [&](std::initializer_list<const char*> names) {
        if (t.header.size() != names.size()) return false;
        std::size_t i = 0;
        for (const char* n : names)
            if (t.header[i++] != n) return false;
        return true;
    };
    if (header_is({"x", "value"})) {
        a.kind = ArtifactKind::field_1d;
        for (const auto& r : t.rows) {
            a.x.push_back(r[0]);
            a.value.push_back(r[1]);
        }
    } else if (header_is({"x", "y", "value"})) {
        a.kind = ArtifactKind::field_2d;
        for (const auto& r : t.rows) {
            a.x.push_back(r[0]);
            a.y.push_back(r[1]);
            a.value.push_back(r[2]);
        }
    } else if (header_is({"index", "value"})) {
        a.kind = ArtifactKind::vector;
        a.value.resize(t.rows.size());
        for (const auto& r : t.rows) {
            auto idx = static_cast<std::size_t>(r[0]);
            if (idx >= a.value.size())
                throw ParseError(file.string() + ": vector index " + std::to_string(idx) +
                                 " out of range");
            a.value[idx] = r[1];
        }
    } else {
        std::string h;
        for (const auto& c : t.header) h += (h.empty() ? "" : ",") + c;
        throw ParseError(file.string() + ": unrecognized artifact header '" + h + "'");
    }
    return a;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    return out;
}

}  // namespace

void write_artifact_1d(const std::filesystem::path& file, const std::vector<double>& x,
                       const std::vector<double>& value) {
    auto out = open_out(file);
    out << "x,value\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << format_double(x[i]) << ',' << format_double(value[i]) << '\n';
}

void write_artifact_2d(const std::filesystem::path& file, const std::vector<double>& x,
                       const std::vector<double>& y, const std::vector<double>& value) {
    auto out = open_out(file);
    out << "x,y,value\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << format_double(x[i]) << ',' << format_double(y[i]) << ','
            << format_double(value[i]) << '\n';
}

void write_artifact_vector(const std::filesystem::path& file, const std::vector<double>& value) {
    auto out = open_out(file);
    out << "index,value\n";
    for (std::size_t i = 0; i < value.size(); ++i)
        out << i << ',' << format_double(value[i]) << '\n';
}

}  // namespace sciagent::csv
