#pragma once

#include "spca/matrix.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace spca {

// Malformed input files; the CLI maps it to exit code 2.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads CSV (rows are observations, optional single header line) or the
// binary format, detected by the magic bytes "SPCAMAT1". Binary layout:
// magic, u64 rows, u64 cols (little-endian), then rows * cols doubles in
// column-major order. Rejects NaN/Inf, ragged rows, and truncation, citing
// the 1-based (row, col) location where possible.
Matrix read_matrix(const std::string& path);

void write_matrix_csv(const std::string& path, const Matrix& m);
void write_matrix_binary(const std::string& path, const Matrix& m);
// Dispatches on extension: ".bin" -> binary, anything else -> CSV.
void write_matrix(const std::string& path, const Matrix& m);

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

// Ordered "key value" lines; values must not contain newlines. Timing keys
// use the "time_" prefix so reproducibility checks can filter them out.
struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;
  void set(const std::string& key, const std::string& value);
  void write(const std::string& path) const;
};

// "iter,objective,stationarity" header plus one row per iteration (1-based;
// the initial objective is manifest data, not an iteration).
void write_trace_csv(const std::string& path, const std::vector<double>& objective,
                     const std::vector<double>& stationarity);

// Groups file: one group per line, 1-based row indices separated by spaces,
// tabs, or commas; blank lines and #-comments skipped. Must partition 1..rows.
std::vector<std::vector<Index>> read_groups(const std::string& path, Index rows);

}  // namespace spca
