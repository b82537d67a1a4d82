#include "geoaug/csv_writer.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "geoaug/error.hpp"

namespace geoaug {

std::string format_double(double value) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

void CsvWriter::comment(std::string_view line) { buf_ << "# " << line << '\n'; }

void CsvWriter::comments(const std::vector<std::string>& lines) {
  for (const auto& l : lines) comment(l);
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buf_ << ',';
    buf_ << columns[i];
  }
  buf_ << '\n';
}

void CsvWriter::separator() {
  if (row_open_) buf_ << ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::field(double v) {
  separator();
  buf_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view v) {
  separator();
  buf_ << v;
  return *this;
}

void CsvWriter::end_row() {
  buf_ << '\n';
  row_open_ = false;
}

}  // namespace geoaug
