#pragma once

#include "geoaug/linalg.hpp"
#include "geoaug/measures.hpp"

namespace geoaug {

/// Affine optimal map x -> shift + T (x - base) between two Gaussians.
struct GaussianMap {
  Vector base;   ///< source mean
  Vector shift;  ///< target mean
  Matrix t;      ///< symmetric positive definite

  Vector evaluate(const Vector& x) const;
  /// Maps every row of `x`.
  Matrix evaluate_rows(const Matrix& x) const;
};

struct GaussianGeodesicPoint {
  double t;
  GaussianParams params;
};

/// Symmetric square root through an eigendecomposition; eigenvalues below 1e-12 are
/// treated as zero.
Matrix spd_sqrt(const Matrix& m);
/// Inverse square root; throws InvalidArgument if an eigenvalue is <= 1e-12.
Matrix spd_inv_sqrt(const Matrix& m);

/// Squared 2-Wasserstein distance. O(d) when both covariances are diagonal or isotropic.
double w2_gaussian_squared(const GaussianParams& p0, const GaussianParams& p1);
double w2_gaussian(const GaussianParams& p0, const GaussianParams& p1);

/// Requires a strictly positive definite source covariance.
GaussianMap gaussian_monge_map(const GaussianParams& p0, const GaussianParams& p1);

/// McCann interpolant at time t in [0, 1]:
///   m_t = (1-t) mu0 + t mu1,  Sigma_t = ((1-t) I + t T) Sigma0 ((1-t) I + t T).
/// t = 0 and t = 1 return the endpoints unchanged.
GaussianGeodesicPoint gaussian_geodesic(const GaussianParams& p0, const GaussianParams& p1,
                                        double t);

/// The symmetric pair N(-r mu, sigma^2 I), N(+r mu, sigma^2 I) at geodesic times t and
/// 1 - t between the two class conditionals, r = 1 - 2t. Requires t in [0, 0.5).
struct AugmentedGaussianPair {
  GaussianParams negative;
  GaussianParams positive;
  double r;
};
AugmentedGaussianPair augmented_gaussian_pair(const ConditionalGaussianModel& model, double t);

}  // namespace geoaug
