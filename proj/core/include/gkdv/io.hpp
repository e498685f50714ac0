#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gkdv::io {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

/// Parses a double written by format_double (also accepts "inf", "nan" and
/// simple fractions such as "1/3"). Throws config on malformed text.
double parse_double(std::string_view text);

/// A CSV table held in memory; cells are formatted once on insertion.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FileEntry {
  std::string path;  // relative to the listed directory, '/' separated
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Regular files below dir in lexicographic order, skipping names in `exclude`.
std::vector<FileEntry> list_files(const std::filesystem::path& dir, const std::vector<std::string>& exclude = {});

}  // namespace gkdv::io
