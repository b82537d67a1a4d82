#include "geoaug/dataset_csv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "geoaug/csv_writer.hpp"
#include "geoaug/error.hpp"

namespace geoaug {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return v;
  // Accept integral values written as doubles, e.g. "1.0".
  if (const auto d = parse_double(s); d && *d == static_cast<int>(*d)) return static_cast<int>(*d);
  return std::nullopt;
}

}  // namespace

LabeledDataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> cols;
  std::string header_line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header_line = std::string(t);
    break;
  }
  if (header_line.empty()) throw ParseError("missing header row", lineno);

  cols = split_fields(header_line);
  const std::size_t width = cols.size();
  std::optional<std::size_t> label_col;
  std::vector<std::optional<std::size_t>> feature_col(width);  // column -> feature index
  std::size_t n_features = 0;
  for (std::size_t c = 0; c < width; ++c) {
    const auto name = trim(cols[c]);
    if (name == "label") {
      if (label_col) throw ParseError("duplicate label column", lineno);
      label_col = c;
    } else if (name.size() > 1 && name.front() == 'f') {
      std::size_t idx = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec != std::errc() || ptr != name.data() + name.size()) {
        throw ParseError("unexpected column '" + std::string(name) + "'", lineno);
      }
      feature_col[c] = idx;
      ++n_features;
    } else {
      throw ParseError("unexpected column '" + std::string(name) + "'", lineno);
    }
  }
  if (!label_col) throw ParseError("missing label column", lineno);
  if (n_features == 0) throw ParseError("no feature columns f0..f{d-1}", lineno);
  {
    std::vector<bool> seen(n_features, false);
    for (const auto& fc : feature_col) {
      if (!fc) continue;
      if (*fc >= n_features || seen[*fc]) {
        throw ParseError("feature columns must be exactly f0..f" + std::to_string(n_features - 1),
                         lineno);
      }
      seen[*fc] = true;
    }
  }

  std::vector<double> values;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       lineno);
    }
    const std::size_t base = values.size();
    values.resize(base + n_features);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == *label_col) {
        const auto y = parse_int(fields[c]);
        if (!y) throw ParseError("non-integer label '" + std::string(trim(fields[c])) + "'", lineno);
        labels.push_back(*y);
      } else {
        const auto v = parse_double(fields[c]);
        if (!v) {
          throw ParseError("non-numeric feature '" + std::string(trim(fields[c])) + "'", lineno);
        }
        values[base + *feature_col[c]] = *v;
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix x(n, static_cast<Eigen::Index>(n_features));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      x(i, j) = values[static_cast<std::size_t>(i * x.cols() + j)];
    }
  }
  try {
    return LabeledDataset::infer(std::move(x), std::move(labels));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
}

LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return read_dataset_csv(in);
}

std::string dataset_csv_string(const LabeledDataset& data, const std::vector<std::string>& comments) {
  CsvWriter w;
  w.comments(comments);
  std::vector<std::string> cols;
  for (std::size_t j = 0; j < data.dim(); ++j) cols.push_back("f" + std::to_string(j));
  cols.emplace_back("label");
  w.header(cols);
  const auto& x = data.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) w.field(x(i, j));
    w.field(data.labels()[static_cast<std::size_t>(i)]);
    w.end_row();
  }
  return w.str();
}

void save_csv(const LabeledDataset& data, const std::filesystem::path& path,
              const std::vector<std::string>& comments) {
  write_file_atomic(path, dataset_csv_string(data, comments));
}

}  // namespace geoaug
