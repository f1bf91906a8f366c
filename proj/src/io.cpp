#include "solistab/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace solistab {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary); // binary: byte-stable newlines
    if (!out) throw ConfigError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ConfigError("csv row width does not match header: " + path);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_g17(row[i]);
        }
        out << '\n';
    }
    if (!out) throw ComputeError("write failure: " + path);
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void write_snapshot(const std::string& path, const Field& f, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    put<std::uint64_t>(out, f.grid.n);
    put<double>(out, f.grid.L);
    put<double>(out, t);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!out) throw ComputeError("write failure: " + path);
}

Field read_snapshot(const std::string& path, double* t_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open snapshot: " + path);
    const auto n = get<std::uint64_t>(in);
    const auto L = get<double>(in);
    const auto t = get<double>(in);
    if (!in) throw ConfigError("truncated snapshot header: " + path);
    Grid g(static_cast<std::size_t>(n), L);
    Field f(g);
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated snapshot payload: " + path);
    if (t_out) *t_out = t;
    return f;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << content;
    if (!out) throw ComputeError("write failure: " + path);
}

} // namespace solistab
