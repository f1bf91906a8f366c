#pragma once
#include <string>
#include <vector>

#include "solistab/grid.hpp"

namespace solistab {

// CSV with a header row and 17-significant-digit floats ("%.17g").
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_g17(double x);

// Binary field snapshot, little-endian:
//   uint64 n, double L, double t, then n doubles.
void write_snapshot(const std::string& path, const Field& f, double t);
// Returns the field and stores the snapshot time in *t_out when non-null.
Field read_snapshot(const std::string& path, double* t_out);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace solistab
