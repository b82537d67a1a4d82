#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "geoaug/linalg.hpp"

namespace geoaug {

/// Weighted point cloud: one point per row of `points`, weights on the simplex.
class DiscreteMeasure {
 public:
  /// Throws InvalidArgument unless n >= 1, d >= 1, weights >= 0 and sum to 1 within 1e-9.
  DiscreteMeasure(Matrix points, Vector weights);

  static DiscreteMeasure uniform(Matrix points);

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  const Matrix& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }

 private:
  Matrix points_;
  Vector weights_;
};

enum class LabelMode { binary, multiclass };

/// Feature rows with integer labels: -1/+1 in binary mode, 0..k-1 in multiclass mode.
/// An empty dataset (zero rows) is representable; operations that need data reject it.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(Matrix features, std::vector<int> labels, LabelMode mode);

  /// Picks binary mode when every label is -1 or +1, multiclass otherwise.
  static LabeledDataset infer(Matrix features, std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  bool empty() const noexcept { return labels_.empty(); }
  LabelMode mode() const noexcept { return mode_; }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Sorted distinct labels.
  std::vector<int> classes() const;
  /// Row indices per class, in original order.
  std::map<int, std::vector<std::size_t>> class_rows() const;

  LabeledDataset subset(const std::vector<std::size_t>& rows) const;

 private:
  Matrix features_{0, 0};
  std::vector<int> labels_;
  LabelMode mode_ = LabelMode::binary;
};

/// Concatenates rows of two datasets with the same dimension and label mode.
LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b);

/// Symmetric positive semi-definite matrix kept in its least general form.
class SpdMatrix {
 public:
  struct Isotropic {
    double value;  // the matrix is value * I
  };
  struct Diagonal {
    Vector values;
  };
  struct Full {
    Matrix values;
  };

  static SpdMatrix isotropic(std::size_t dim, double value);
  static SpdMatrix diagonal(Vector values);
  /// Accepts symmetric (1e-9) PSD (min eigenvalue >= -1e-8) matrices.
  static SpdMatrix full(Matrix values);

  std::size_t dim() const noexcept { return dim_; }
  bool is_isotropic() const noexcept { return std::holds_alternative<Isotropic>(form_); }
  bool is_diagonal() const noexcept { return std::holds_alternative<Diagonal>(form_); }
  bool is_full() const noexcept { return std::holds_alternative<Full>(form_); }
  const std::variant<Isotropic, Diagonal, Full>& form() const noexcept { return form_; }

  /// Explicit promotion to the diagonal form; throws for full matrices.
  Vector diagonal_values() const;
  Matrix dense() const;
  double trace() const;
  Vector apply(const Vector& x) const;

 private:
  SpdMatrix(std::size_t dim, std::variant<Isotropic, Diagonal, Full> form)
      : dim_(dim), form_(std::move(form)) {}

  std::size_t dim_;
  std::variant<Isotropic, Diagonal, Full> form_;
};

struct GaussianParams {
  /// Throws when the covariance dimension differs from the mean length.
  GaussianParams(Vector mean, SpdMatrix covariance);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }

  Vector mean;
  SpdMatrix covariance;
};

/// Binary model: Y uniform on {-1,+1}, X | Y=y ~ N(y * mu, sigma^2 I).
class ConditionalGaussianModel {
 public:
  ConditionalGaussianModel(Vector mu, double sigma);

  /// mu = norm * e_1 in dimension d.
  static ConditionalGaussianModel axis_aligned(std::size_t dim, double mu_norm, double sigma);

  const Vector& mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(mu_.size()); }

  /// N(label * mu, sigma^2 I) for label in {-1,+1}.
  GaussianParams class_conditional(int label) const;

 private:
  Vector mu_;
  double sigma_;
};

LabeledDataset sample_conditional_gaussian(const ConditionalGaussianModel& model, std::size_t n,
                                           std::uint64_t seed);

/// n iid draws from N(mean, covariance) as rows. Full covariances use a Cholesky-like
/// symmetric square root.
Matrix sample_gaussian(const GaussianParams& params, std::size_t n, std::uint64_t seed);

/// One uniform-weight measure per class present.
std::map<int, DiscreteMeasure> split_by_class(const LabeledDataset& data);

}  // namespace geoaug
