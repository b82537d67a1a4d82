#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "geoaug/measures.hpp"

namespace geoaug {

// Dataset CSV: header row with feature columns f0..f{d-1} plus a `label` column
// (any position), comma separated, '.' decimal point. Lines starting with '#'
// are skipped. Errors carry the physical line number.

LabeledDataset read_dataset_csv(std::istream& in);
LabeledDataset load_csv(const std::filesystem::path& path);

/// `comments` are written first as '# ' lines.
void save_csv(const LabeledDataset& data, const std::filesystem::path& path,
              const std::vector<std::string>& comments = {});
std::string dataset_csv_string(const LabeledDataset& data,
                               const std::vector<std::string>& comments = {});

}  // namespace geoaug
