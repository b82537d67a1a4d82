#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "geoaug/cli/config.hpp"
#include "geoaug/entropic_ot.hpp"
#include "geoaug/measures.hpp"

namespace geoaug::cli {

// Six significant digits, for log lines and check names.
inline std::string short_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline ConditionalGaussianModel model_from(const Config& c) {
  const std::size_t d = c.get_count("d");
  if (d < 1) throw UsageError("config key 'd': must be >= 1");
  return ConditionalGaussianModel::axis_aligned(d, c.get_nonnegative("mu_norm"),
                                                c.get_positive("sigma"));
}

inline SinkhornOptions sinkhorn_from(const Config& c) {
  SinkhornOptions o;
  o.epsilon = c.get_positive("sinkhorn_eps");
  o.max_iter = c.get_count("sinkhorn_max_iter");
  if (o.max_iter < 1) throw UsageError("config key 'sinkhorn_max_iter': must be >= 1");
  return o;
}

inline std::vector<KeySpec> model_keys(const std::string& d = "10") {
  return {{"d", d, "feature dimension"},
          {"mu_norm", "1", "norm of the class mean mu = mu_norm * e1"},
          {"sigma", "1", "class noise standard deviation"}};
}

inline std::vector<KeySpec> join(std::vector<KeySpec> a, const std::vector<KeySpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace geoaug::cli
