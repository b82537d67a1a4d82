#include "geoaug/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "geoaug/error.hpp"
#include "geoaug/rng.hpp"

namespace geoaug {

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw InvalidArgument("DiscreteMeasure: need at least one point of dimension >= 1");
  }
  if (weights_.size() != points_.rows()) {
    throw InvalidArgument("DiscreteMeasure: weight count does not match point count");
  }
  if (!points_.allFinite() || !weights_.allFinite()) {
    throw InvalidArgument("DiscreteMeasure: non-finite point or weight");
  }
  if (weights_.minCoeff() < 0.0) throw InvalidArgument("DiscreteMeasure: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-9) {
    throw InvalidArgument("DiscreteMeasure: weights must sum to 1");
  }
}

DiscreteMeasure DiscreteMeasure::uniform(Matrix points) {
  const auto n = points.rows();
  if (n < 1) throw InvalidArgument("DiscreteMeasure::uniform: empty point set");
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return DiscreteMeasure(std::move(points), std::move(w));
}

LabeledDataset::LabeledDataset(Matrix features, std::vector<int> labels, LabelMode mode)
    : features_(std::move(features)), labels_(std::move(labels)), mode_(mode) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw InvalidArgument("LabeledDataset: feature rows (" + std::to_string(features_.rows()) +
                          ") != label count (" + std::to_string(labels_.size()) + ")");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int y = labels_[i];
    if (mode_ == LabelMode::binary && y != -1 && y != 1) {
      throw InvalidArgument("LabeledDataset: binary label must be -1 or +1 at row " +
                            std::to_string(i));
    }
    if (mode_ == LabelMode::multiclass && y < 0) {
      throw InvalidArgument("LabeledDataset: class index must be >= 0 at row " +
                            std::to_string(i));
    }
  }
}

LabeledDataset LabeledDataset::infer(Matrix features, std::vector<int> labels) {
  const bool binary =
      std::all_of(labels.begin(), labels.end(), [](int y) { return y == -1 || y == 1; });
  return LabeledDataset(std::move(features), std::move(labels),
                        binary ? LabelMode::binary : LabelMode::multiclass);
}

std::vector<int> LabeledDataset::classes() const {
  std::set<int> s(labels_.begin(), labels_.end());
  return {s.begin(), s.end()};
}

std::map<int, std::vector<std::size_t>> LabeledDataset::class_rows() const {
  std::map<int, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < labels_.size(); ++i) rows[labels_[i]].push_back(i);
  return rows;
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& rows) const {
  Matrix f(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= labels_.size()) throw InvalidArgument("LabeledDataset::subset: row out of range");
    f.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(rows[k]));
    y.push_back(labels_[rows[k]]);
  }
  return LabeledDataset(std::move(f), std::move(y), mode_);
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dim() != b.dim()) throw InvalidArgument("concat: dimension mismatch");
  if (a.mode() != b.mode()) throw InvalidArgument("concat: label mode mismatch");
  Matrix f(static_cast<Eigen::Index>(a.size() + b.size()), a.features().cols());
  f.topRows(a.features().rows()) = a.features();
  f.bottomRows(b.features().rows()) = b.features();
  std::vector<int> y = a.labels();
  y.insert(y.end(), b.labels().begin(), b.labels().end());
  return LabeledDataset(std::move(f), std::move(y), a.mode());
}

SpdMatrix SpdMatrix::isotropic(std::size_t dim, double value) {
  if (dim < 1) throw InvalidArgument("SpdMatrix: dimension must be >= 1");
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument("SpdMatrix: isotropic variance must be positive and finite");
  }
  return SpdMatrix(dim, Isotropic{value});
}

SpdMatrix SpdMatrix::diagonal(Vector values) {
  if (values.size() < 1) throw InvalidArgument("SpdMatrix: dimension must be >= 1");
  if (!values.allFinite() || values.minCoeff() <= 0.0) {
    throw InvalidArgument("SpdMatrix: diagonal entries must be positive and finite");
  }
  const auto dim = static_cast<std::size_t>(values.size());
  return SpdMatrix(dim, Diagonal{std::move(values)});
}

SpdMatrix SpdMatrix::full(Matrix values) {
  if (values.rows() < 1 || values.rows() != values.cols()) {
    throw InvalidArgument("SpdMatrix: full covariance must be square and non-empty");
  }
  if (!values.allFinite()) throw InvalidArgument("SpdMatrix: non-finite covariance entry");
  if ((values - values.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw InvalidArgument("SpdMatrix: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(values, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8) {
    throw InvalidArgument("SpdMatrix: covariance is not positive semi-definite");
  }
  const auto dim = static_cast<std::size_t>(values.rows());
  return SpdMatrix(dim, Full{std::move(values)});
}

Vector SpdMatrix::diagonal_values() const {
  if (const auto* iso = std::get_if<Isotropic>(&form_)) {
    return Vector::Constant(static_cast<Eigen::Index>(dim_), iso->value);
  }
  if (const auto* diag = std::get_if<Diagonal>(&form_)) return diag->values;
  throw InvalidArgument("SpdMatrix: full matrix has no diagonal form");
}

Matrix SpdMatrix::dense() const {
  if (const auto* full = std::get_if<Full>(&form_)) return full->values;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  m.diagonal() = diagonal_values();
  return m;
}

double SpdMatrix::trace() const {
  if (const auto* iso = std::get_if<Isotropic>(&form_)) {
    return iso->value * static_cast<double>(dim_);
  }
  if (const auto* diag = std::get_if<Diagonal>(&form_)) return diag->values.sum();
  return std::get<Full>(form_).values.trace();
}

Vector SpdMatrix::apply(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) throw InvalidArgument("SpdMatrix::apply: size");
  if (const auto* iso = std::get_if<Isotropic>(&form_)) return iso->value * x;
  if (const auto* diag = std::get_if<Diagonal>(&form_)) return diag->values.cwiseProduct(x);
  return std::get<Full>(form_).values * x;
}

GaussianParams::GaussianParams(Vector mean_, SpdMatrix covariance_)
    : mean(std::move(mean_)), covariance(std::move(covariance_)) {
  if (static_cast<std::size_t>(mean.size()) != covariance.dim()) {
    throw InvalidArgument("GaussianParams: mean and covariance dimensions differ");
  }
  if (!mean.allFinite()) throw InvalidArgument("GaussianParams: non-finite mean");
}

ConditionalGaussianModel::ConditionalGaussianModel(Vector mu, double sigma)
    : mu_(std::move(mu)), sigma_(sigma) {
  if (mu_.size() < 1) throw InvalidArgument("ConditionalGaussianModel: empty mean");
  if (!mu_.allFinite()) throw InvalidArgument("ConditionalGaussianModel: non-finite mean");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw InvalidArgument("ConditionalGaussianModel: sigma must be positive");
  }
}

ConditionalGaussianModel ConditionalGaussianModel::axis_aligned(std::size_t dim, double mu_norm,
                                                                double sigma) {
  if (dim < 1) throw InvalidArgument("ConditionalGaussianModel: dimension must be >= 1");
  Vector mu = Vector::Zero(static_cast<Eigen::Index>(dim));
  mu(0) = mu_norm;
  return ConditionalGaussianModel(std::move(mu), sigma);
}

GaussianParams ConditionalGaussianModel::class_conditional(int label) const {
  if (label != -1 && label != 1) throw InvalidArgument("class_conditional: label must be -1 or +1");
  return GaussianParams(static_cast<double>(label) * mu_,
                        SpdMatrix::isotropic(dim(), sigma_ * sigma_));
}

LabeledDataset sample_conditional_gaussian(const ConditionalGaussianModel& model, std::size_t n,
                                           std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample_conditional_gaussian: n must be >= 1");
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(model.dim());
  Matrix x(static_cast<Eigen::Index>(n), d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = rng.sign();
    y[i] = label;
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < d; ++j) {
      x(r, j) = label * model.mu()(j) + model.sigma() * rng.normal();
    }
  }
  return LabeledDataset(std::move(x), std::move(y), LabelMode::binary);
}

Matrix sample_gaussian(const GaussianParams& params, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(params.dim());
  Matrix z(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.normal();
  }
  const auto& cov = params.covariance;
  if (cov.is_full()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov.dense());
    const Vector s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix root = eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose();
    z = z * root;  // root is symmetric
  } else {
    z = z * cov.diagonal_values().cwiseSqrt().asDiagonal();
  }
  z.rowwise() += params.mean.transpose();
  return z;
}

std::map<int, DiscreteMeasure> split_by_class(const LabeledDataset& data) {
  if (data.empty()) throw InvalidArgument("split_by_class: empty dataset");
  std::map<int, DiscreteMeasure> out;
  for (const auto& [label, rows] : data.class_rows()) {
    out.emplace(label, DiscreteMeasure::uniform(data.subset(rows).features()));
  }
  return out;
}

}  // namespace geoaug
