#include "spca/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "matrix payloads are written as raw little-endian doubles");

namespace spca {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'C', 'A', 'M', 'A', 'T', '1'};
constexpr Index kMaxDim = Index(1) << 31;  // guards allocation from corrupt headers

void pack_u64(std::uint64_t v, char* out) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t unpack_u64(const char* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

Matrix read_matrix_binary(std::ifstream& in, const std::string& path) {
  char header[16];
  if (!in.read(header, sizeof header))
    throw parse_error(path + ": truncated binary header");
  std::uint64_t rows = unpack_u64(header);
  std::uint64_t cols = unpack_u64(header + 8);
  if (rows == 0 || cols == 0 || rows > static_cast<std::uint64_t>(kMaxDim) ||
      cols > static_cast<std::uint64_t>(kMaxDim) ||
      rows * cols > static_cast<std::uint64_t>(kMaxDim))
    throw parse_error(path + ": implausible dimensions " + std::to_string(rows) + " x " +
                      std::to_string(cols));
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  const std::streamsize bytes = static_cast<std::streamsize>(rows * cols * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(m.data()), bytes))
    throw parse_error(path + ": truncated payload, expected " + std::to_string(bytes) +
                      " data bytes");
  if (!m.allFinite()) throw parse_error(path + ": payload contains non-finite values");
  return m;
}

Matrix read_matrix_csv(std::ifstream& in, const std::string& path) {
  std::vector<double> values;
  Index cols = -1;
  Index row = 0;  // 1-based data row, assigned before each parse
  std::string line;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty()) continue;
    auto fields = split_fields(view);

    if (first_content_line) {
      first_content_line = false;
      bool all_numeric = true;
      for (const auto& f : fields)
        if (!parse_double(f)) {
          all_numeric = false;
          break;
        }
      if (!all_numeric) continue;  // single header line
    }

    ++row;
    if (cols < 0) cols = static_cast<Index>(fields.size());
    if (static_cast<Index>(fields.size()) != cols)
      throw parse_error(path + ": row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(cols));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      auto v = parse_double(fields[j]);
      if (!v)
        throw parse_error(path + ": cannot parse '" + std::string(trim(fields[j])) +
                          "' at row " + std::to_string(row) + ", column " +
                          std::to_string(j + 1));
      if (!std::isfinite(*v))
        throw parse_error(path + ": non-finite value at row " + std::to_string(row) +
                          ", column " + std::to_string(j + 1));
      values.push_back(*v);
    }
  }
  if (row == 0) throw parse_error(path + ": no data rows");

  Matrix m(row, cols);
  for (Index i = 0; i < row; ++i)
    for (Index j = 0; j < cols; ++j)
      m(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  return m;
}

}  // namespace

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error(path + ": cannot open for reading");
  char magic[8];
  in.read(magic, sizeof magic);
  if (in.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0)
    return read_matrix_binary(in, path);
  in.clear();
  in.seekg(0);
  return read_matrix_csv(in, path);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line.push_back(',');
      line += format_double(m(i, j));
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_matrix_binary(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  char header[24];
  std::memcpy(header, kMagic, 8);
  pack_u64(static_cast<std::uint64_t>(m.rows()), header + 8);
  pack_u64(static_cast<std::uint64_t>(m.cols()), header + 16);
  out.write(header, sizeof header);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double)) * m.size());
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_matrix(const std::string& path, const Matrix& m) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0)
    write_matrix_binary(path, m);
  else
    write_matrix_csv(path, m);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries)
    if (k == key) {
      v = value;
      return;
    }
  entries.emplace_back(key, value);
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (const auto& [k, v] : entries) out << k << ' ' << v << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_trace_csv(const std::string& path, const std::vector<double>& objective,
                     const std::vector<double>& stationarity) {
  if (objective.size() != stationarity.size() + 1)
    throw std::invalid_argument(
        "write_trace_csv: objective must have one more entry (the initial value) than "
        "stationarity");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "iter,objective,stationarity\n";
  for (std::size_t i = 0; i < stationarity.size(); ++i)
    out << i + 1 << ',' << format_double(objective[i + 1]) << ','
        << format_double(stationarity[i]) << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<std::vector<Index>> read_groups(const std::string& path, Index rows) {
  std::ifstream in(path);
  if (!in) throw parse_error(path + ": cannot open for reading");
  if (rows < 1) throw std::invalid_argument("read_groups: rows must be positive");

  std::vector<std::vector<Index>> groups;
  std::vector<Index> owner(static_cast<std::size_t>(rows), -1);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;

    std::vector<Index> group;
    std::size_t pos = 0;
    while (pos < view.size()) {
      while (pos < view.size() &&
             (view[pos] == ' ' || view[pos] == '\t' || view[pos] == ','))
        ++pos;
      if (pos >= view.size()) break;
      std::size_t end = pos;
      while (end < view.size() && view[end] != ' ' && view[end] != '\t' && view[end] != ',')
        ++end;
      std::string_view token = view.substr(pos, end - pos);
      long long idx = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
      if (ec != std::errc() || ptr != token.data() + token.size())
        throw parse_error(path + ": cannot parse index '" + std::string(token) + "' (line " +
                          std::to_string(lineno) + ")");
      if (idx < 1 || idx > rows)
        throw parse_error(path + ": index " + std::to_string(idx) + " out of range [1, " +
                          std::to_string(rows) + "] (line " + std::to_string(lineno) + ")");
      Index zero_based = static_cast<Index>(idx - 1);
      if (owner[static_cast<std::size_t>(zero_based)] >= 0)
        throw parse_error(path + ": index " + std::to_string(idx) +
                          " appears in more than one group (line " + std::to_string(lineno) +
                          ")");
      owner[static_cast<std::size_t>(zero_based)] = static_cast<Index>(groups.size());
      group.push_back(zero_based);
      pos = end;
    }
    if (!group.empty()) groups.push_back(std::move(group));
  }

  if (groups.empty()) throw parse_error(path + ": no groups found");
  for (Index i = 0; i < rows; ++i)
    if (owner[static_cast<std::size_t>(i)] < 0)
      throw parse_error(path + ": variable " + std::to_string(i + 1) +
                        " is not covered by any group");
  return groups;
}

}  // namespace spca
