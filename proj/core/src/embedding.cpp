#include "geoaug/embedding.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "geoaug/error.hpp"

namespace geoaug {

EmbeddingHook EmbeddingHook::identity(std::size_t dim) {
  if (dim < 1) throw InvalidArgument("EmbeddingHook: dimension must be >= 1");
  const auto d = static_cast<Eigen::Index>(dim);
  EmbeddingHook h;
  h.w_ = Matrix::Identity(d, d);
  h.c_ = Vector::Zero(d);
  h.pinv_ = h.w_;
  h.identity_ = true;
  return h;
}

EmbeddingHook::EmbeddingHook(Matrix w, Vector c) : w_(std::move(w)), c_(std::move(c)) {
  if (w_.rows() < 1 || w_.cols() < 1) throw InvalidArgument("EmbeddingHook: empty weight matrix");
  if (c_.size() != w_.rows()) throw InvalidArgument("EmbeddingHook: offset length != output dim");
  if (!w_.allFinite() || !c_.allFinite()) throw InvalidArgument("EmbeddingHook: non-finite map");
  pinv_ = w_.completeOrthogonalDecomposition().pseudoInverse();
}

EmbeddingHook EmbeddingHook::fit_pca(const Matrix& x, std::size_t z_dim, bool whiten) {
  if (x.rows() < 2) throw InvalidArgument("EmbeddingHook::fit_pca: need at least two rows");
  const auto d = x.cols();
  if (z_dim < 1 || static_cast<Eigen::Index>(z_dim) > d) {
    throw InvalidArgument("EmbeddingHook::fit_pca: z_dim must lie in [1, d]");
  }
  const Vector mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const auto z = static_cast<Eigen::Index>(z_dim);
  Matrix w(z, d);
  for (Eigen::Index k = 0; k < z; ++k) {
    // Eigenvalues come in increasing order; take the largest first.
    const Eigen::Index col = d - 1 - k;
    double scale = 1.0;
    const double var = eig.eigenvalues()(col);
    if (whiten && var > 1e-12) scale = 1.0 / std::sqrt(var);
    w.row(k) = scale * eig.eigenvectors().col(col).transpose();
  }
  const Vector c = -(w * mean);
  return EmbeddingHook(std::move(w), c);
}

Matrix EmbeddingHook::forward(const Matrix& x) const {
  if (x.cols() != w_.cols()) throw InvalidArgument("EmbeddingHook::forward: dimension mismatch");
  if (identity_) return x;
  Matrix z = x * w_.transpose();
  z.rowwise() += c_.transpose();
  return z;
}

Matrix EmbeddingHook::inverse(const Matrix& z) const {
  if (z.cols() != w_.rows()) throw InvalidArgument("EmbeddingHook::inverse: dimension mismatch");
  if (identity_) return z;
  return (z.rowwise() - c_.transpose()) * pinv_.transpose();
}

}  // namespace geoaug
