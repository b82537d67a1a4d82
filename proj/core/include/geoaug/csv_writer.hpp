#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace geoaug {

/// Round-trippable decimal text for a double: 17 significant digits.
std::string format_double(double value);

/// Writes `content` to a temporary sibling then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Small buffered CSV builder used by every numeric dump in the project.
/// Lines starting with '#' are comments and are skipped by the readers here.
class CsvWriter {
 public:
  void comment(std::string_view line);
  void comments(const std::vector<std::string>& lines);
  void header(const std::vector<std::string>& columns);

  CsvWriter& field(double v);
  CsvWriter& field(std::string_view v);
  template <typename Int>
    requires std::is_integral_v<Int>
  CsvWriter& field(Int v) {
    separator();
    buf_ << static_cast<long long>(v);
    return *this;
  }
  CsvWriter& field(const char* v) { return field(std::string_view(v)); }
  void end_row();

  std::string str() const { return buf_.str(); }
  void save(const std::filesystem::path& path) const { write_file_atomic(path, buf_.str()); }

 private:
  void separator();

  std::ostringstream buf_;
  bool row_open_ = false;
};

}  // namespace geoaug
