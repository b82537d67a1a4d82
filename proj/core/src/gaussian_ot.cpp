#include "geoaug/gaussian_ot.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "geoaug/error.hpp"

namespace geoaug {
namespace {

constexpr double kEigenFloor = 1e-12;

void check_same_dim(const GaussianParams& p0, const GaussianParams& p1, const char* who) {
  if (p0.dim() != p1.dim()) {
    throw InvalidArgument(std::string(who) + ": dimension mismatch (" + std::to_string(p0.dim()) +
                          " vs " + std::to_string(p1.dim()) + ")");
  }
}

bool both_diagonal(const GaussianParams& p0, const GaussianParams& p1) {
  return !p0.covariance.is_full() && !p1.covariance.is_full();
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Orders the pair so the cross term is evaluated identically for (p, q) and (q, p).
bool lex_less(const Matrix& a, const Matrix& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

Vector GaussianMap::evaluate(const Vector& x) const {
  if (x.size() != base.size()) throw InvalidArgument("GaussianMap::evaluate: dimension mismatch");
  return shift + t * (x - base);
}

Matrix GaussianMap::evaluate_rows(const Matrix& x) const {
  if (x.cols() != base.size()) throw InvalidArgument("GaussianMap::evaluate: dimension mismatch");
  Matrix out = (x.rowwise() - base.transpose()) * t.transpose();
  out.rowwise() += shift.transpose();
  return out;
}

Matrix spd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m));
  Vector s = eig.eigenvalues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = s(i) > kEigenFloor ? std::sqrt(s(i)) : 0.0;
  return symmetrized(eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose());
}

Matrix spd_inv_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m));
  if (eig.eigenvalues().minCoeff() <= kEigenFloor) {
    throw InvalidArgument("spd_inv_sqrt: matrix is singular");
  }
  const Vector s = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return symmetrized(eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose());
}

double w2_gaussian_squared(const GaussianParams& p0, const GaussianParams& p1) {
  check_same_dim(p0, p1, "w2_gaussian");
  const double mean_part = (p0.mean - p1.mean).squaredNorm();
  if (both_diagonal(p0, p1)) {
    const Vector a = p0.covariance.diagonal_values();
    const Vector b = p1.covariance.diagonal_values();
    return mean_part + (a.cwiseSqrt() - b.cwiseSqrt()).squaredNorm();
  }
  const Matrix s0 = p0.covariance.dense();
  const Matrix s1 = p1.covariance.dense();
  if (s0 == s1) return mean_part;
  const Matrix& first = lex_less(s0, s1) ? s0 : s1;
  const Matrix& second = lex_less(s0, s1) ? s1 : s0;
  const Matrix root = spd_sqrt(first);
  const double cross = spd_sqrt(root * second * root).trace();
  const double bures = first.trace() + second.trace() - 2.0 * cross;
  return mean_part + std::max(0.0, bures);
}

double w2_gaussian(const GaussianParams& p0, const GaussianParams& p1) {
  return std::sqrt(w2_gaussian_squared(p0, p1));
}

GaussianMap gaussian_monge_map(const GaussianParams& p0, const GaussianParams& p1) {
  check_same_dim(p0, p1, "gaussian_monge_map");
  const auto d = static_cast<Eigen::Index>(p0.dim());
  GaussianMap map{p0.mean, p1.mean, Matrix::Zero(d, d)};
  if (both_diagonal(p0, p1)) {
    const Vector a = p0.covariance.diagonal_values();
    if (a.minCoeff() <= kEigenFloor) throw InvalidArgument("gaussian_monge_map: singular source");
    const Vector b = p1.covariance.diagonal_values();
    map.t.diagonal() = (b.array() / a.array()).sqrt().matrix();
    return map;
  }
  // T = S0^{-1/2} (S0^{1/2} S1 S0^{1/2})^{1/2} S0^{-1/2}
  const Matrix s0 = p0.covariance.dense();
  const Matrix inv_root = spd_inv_sqrt(s0);
  const Matrix root = spd_sqrt(s0);
  map.t = symmetrized(inv_root * spd_sqrt(root * p1.covariance.dense() * root) * inv_root);
  return map;
}

GaussianGeodesicPoint gaussian_geodesic(const GaussianParams& p0, const GaussianParams& p1,
                                        double t) {
  check_same_dim(p0, p1, "gaussian_geodesic");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("gaussian_geodesic: t must lie in [0, 1]");
  if (t == 0.0) return {t, p0};
  if (t == 1.0) return {t, p1};
  Vector mean = (1.0 - t) * p0.mean + t * p1.mean;
  const auto& c0 = p0.covariance;
  const auto& c1 = p1.covariance;
  if (c0.is_isotropic() && c1.is_isotropic()) {
    const double s0 = std::sqrt(c0.diagonal_values()(0));
    const double s1 = std::sqrt(c1.diagonal_values()(0));
    const double s = (1.0 - t) * s0 + t * s1;
    return {t, GaussianParams(std::move(mean), SpdMatrix::isotropic(p0.dim(), s * s))};
  }
  if (both_diagonal(p0, p1)) {
    const Vector s =
        (1.0 - t) * c0.diagonal_values().cwiseSqrt() + t * c1.diagonal_values().cwiseSqrt();
    return {t, GaussianParams(std::move(mean), SpdMatrix::diagonal(s.cwiseProduct(s)))};
  }
  const GaussianMap map = gaussian_monge_map(p0, p1);
  const auto d = static_cast<Eigen::Index>(p0.dim());
  const Matrix a = (1.0 - t) * Matrix::Identity(d, d) + t * map.t;
  const Matrix cov = symmetrized(a * c0.dense() * a);
  return {t, GaussianParams(std::move(mean), SpdMatrix::full(cov))};
}

AugmentedGaussianPair augmented_gaussian_pair(const ConditionalGaussianModel& model, double t) {
  if (!(t >= 0.0 && t < 0.5)) {
    throw InvalidArgument("augmented_gaussian_pair: t must lie in [0, 0.5)");
  }
  const double r = 1.0 - 2.0 * t;
  const SpdMatrix cov = SpdMatrix::isotropic(model.dim(), model.sigma() * model.sigma());
  return {GaussianParams(-r * model.mu(), cov), GaussianParams(r * model.mu(), cov), r};
}

}  // namespace geoaug
