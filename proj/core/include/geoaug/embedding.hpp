#pragma once

#include <cstddef>

#include "geoaug/linalg.hpp"

namespace geoaug {

/// Affine embedding z = W x + c with a pseudo-inverse decoder x = W^+ (z - c).
/// Rows of matrices are points.
class EmbeddingHook {
 public:
  static EmbeddingHook identity(std::size_t dim);
  /// Explicit map; the decoder is the Moore-Penrose pseudo-inverse of W.
  EmbeddingHook(Matrix w, Vector c);

  /// PCA fitted on the rows of `x`: projects the centered data onto the leading
  /// `z_dim` principal directions, scaled to unit variance when `whiten` is set.
  /// Directions with variance below 1e-12 are not whitened.
  static EmbeddingHook fit_pca(const Matrix& x, std::size_t z_dim, bool whiten);

  Matrix forward(const Matrix& x) const;
  Matrix inverse(const Matrix& z) const;

  bool is_identity() const noexcept { return identity_; }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(w_.cols()); }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(w_.rows()); }
  const Matrix& weights() const noexcept { return w_; }
  const Vector& offset() const noexcept { return c_; }
  const Matrix& decoder() const noexcept { return pinv_; }

 private:
  EmbeddingHook() = default;

  Matrix w_;
  Vector c_;
  Matrix pinv_;
  bool identity_ = false;
};

}  // namespace geoaug
