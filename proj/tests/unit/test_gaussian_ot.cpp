#include <cmath>

#include <gtest/gtest.h>

#include "geoaug/error.hpp"
#include "geoaug/gaussian_ot.hpp"
#include "geoaug/rng.hpp"
#include "oracles.hpp"

using namespace geoaug;

namespace {

Matrix random_spd(std::size_t d, Rng& rng) {
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  return a * a.transpose() / static_cast<double>(d) + 0.3 * Matrix::Identity(d, d);
}

Vector random_vector(std::size_t d, Rng& rng) {
  Vector v(d);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v;
}

GaussianParams random_full(std::size_t d, Rng& rng) {
  return GaussianParams(random_vector(d, rng), SpdMatrix::full(random_spd(d, rng)));
}

TEST(W2Gaussian, Examples) {
  const GaussianParams id(Vector::Zero(2), SpdMatrix::isotropic(2, 1.0));
  EXPECT_DOUBLE_EQ(w2_gaussian(id, id), 0.0);
  const GaussianParams four(Vector::Zero(2), SpdMatrix::isotropic(2, 4.0));
  EXPECT_NEAR(w2_gaussian(id, four), std::sqrt(2.0), 1e-12);
  Vector mu(3);
  mu << 0.5, -1.0, 2.0;
  const GaussianParams neg(-mu, SpdMatrix::isotropic(3, 2.0)), pos(mu, SpdMatrix::isotropic(3, 2.0));
  EXPECT_NEAR(w2_gaussian(neg, pos), 2.0 * mu.norm(), 1e-12);
}

TEST(W2Gaussian, DiagonalPathAgreesWithTheGeneralOracle) {
  Rng rng(1);
  Vector d0(4), d1(4);
  for (int i = 0; i < 4; ++i) {
    d0(i) = 0.2 + rng.uniform();
    d1(i) = 0.2 + 3.0 * rng.uniform();
  }
  const Vector m0 = random_vector(4, rng), m1 = random_vector(4, rng);
  const GaussianParams p0(m0, SpdMatrix::diagonal(d0)), p1(m1, SpdMatrix::diagonal(d1));
  double expected = (m0 - m1).squaredNorm();
  for (int i = 0; i < 4; ++i) expected += std::pow(std::sqrt(d0(i)) - std::sqrt(d1(i)), 2);
  EXPECT_NEAR(w2_gaussian_squared(p0, p1), expected, 1e-12);
  const Matrix s0 = d0.asDiagonal(), s1 = d1.asDiagonal();
  EXPECT_NEAR(w2_gaussian_squared(p0, p1), oracle::w2_squared(m0, s0, m1, s1), 1e-9);
}

TEST(W2Gaussian, FullCovariancesAgreeWithTargetSideOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p0 = random_full(3, rng), p1 = random_full(3, rng);
    EXPECT_NEAR(w2_gaussian_squared(p0, p1),
                oracle::w2_squared(p0.mean, p0.covariance.dense(), p1.mean, p1.covariance.dense()),
                1e-8);
  }
}

TEST(W2Gaussian, SymmetryIdentityAndTriangle) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_full(3, rng), q = random_full(3, rng), s = random_full(3, rng);
    EXPECT_EQ(w2_gaussian(p, q), w2_gaussian(q, p));
    EXPECT_NEAR(w2_gaussian(p, p), 0.0, 1e-6);
    EXPECT_LE(w2_gaussian(p, s), w2_gaussian(p, q) + w2_gaussian(q, s) + 1e-8);
  }
}

TEST(W2Gaussian, DimensionMismatchIsRejected) {
  const GaussianParams a(Vector::Zero(2), SpdMatrix::isotropic(2, 1.0));
  const GaussianParams b(Vector::Zero(3), SpdMatrix::isotropic(3, 1.0));
  EXPECT_THROW(w2_gaussian(a, b), InvalidArgument);
  EXPECT_THROW(GaussianParams(Vector::Zero(2), SpdMatrix::isotropic(3, 1.0)), InvalidArgument);
}

TEST(SpdRoots, AgreeWithDenmanBeavers) {
  Rng rng(4);
  const Matrix m = random_spd(4, rng);
  const Matrix r = spd_sqrt(m);
  EXPECT_LE((r - oracle::sqrtm(m)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((spd_inv_sqrt(m) * r - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_THROW(spd_inv_sqrt(Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(MongeMap, Examples) {
  Vector m0(2), m1(2);
  m0 << 1, 2;
  m1 << -1, 0.5;
  const auto translate = gaussian_monge_map(GaussianParams(m0, SpdMatrix::isotropic(2, 0.7)),
                                            GaussianParams(m1, SpdMatrix::isotropic(2, 0.7)));
  EXPECT_LE((translate.t - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  Vector x(2);
  x << 3, -4;
  EXPECT_LE((translate.evaluate(x) - (m1 + x - m0)).cwiseAbs().maxCoeff(), 1e-12);

  const auto scale = gaussian_monge_map(GaussianParams(Vector::Zero(2), SpdMatrix::isotropic(2, 1.0)),
                                        GaussianParams(Vector::Zero(2), SpdMatrix::isotropic(2, 4.0)));
  EXPECT_LE((scale.t - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MongeMap, PushesSourceCovarianceOntoTarget) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p0 = random_full(3, rng), p1 = random_full(3, rng);
    const auto map = gaussian_monge_map(p0, p1);
    EXPECT_LE((map.t - map.t.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    Eigen::SelfAdjointEigenSolver<Matrix> es(map.t);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    EXPECT_LE((map.t * p0.covariance.dense() * map.t - p1.covariance.dense()).cwiseAbs().maxCoeff(),
              1e-8);
  }
}

TEST(MongeMap, SingularSourceIsRejected) {
  Matrix s(2, 2);
  s << 1, 0, 0, 0;
  EXPECT_THROW(gaussian_monge_map(GaussianParams(Vector::Zero(2), SpdMatrix::full(s)),
                                  GaussianParams(Vector::Zero(2), SpdMatrix::isotropic(2, 1.0))),
               InvalidArgument);
}

TEST(MongeMap, TransportCostMatchesDistanceByMonteCarlo) {
  Rng rng(6);
  const auto p0 = random_full(3, rng), p1 = random_full(3, rng);
  const auto map = gaussian_monge_map(p0, p1);
  const Matrix x = sample_gaussian(p0, 100000, 77);
  const Matrix y = map.evaluate_rows(x);
  const Vector sq = (x - y).rowwise().squaredNorm();
  const double mean = sq.mean();
  const double sd = std::sqrt((sq.array() - mean).square().sum() / (sq.size() - 1));
  const double se = sd / std::sqrt(static_cast<double>(sq.size()));
  EXPECT_LE(std::abs(mean - w2_gaussian_squared(p0, p1)), 3.0 * se);

  const Vector ymean = y.colwise().mean().transpose();
  EXPECT_LE((ymean - p1.mean).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Geodesic, EndpointsAndRange) {
  Rng rng(7);
  const auto p0 = random_full(3, rng), p1 = random_full(3, rng);
  const auto g0 = gaussian_geodesic(p0, p1, 0.0), g1 = gaussian_geodesic(p0, p1, 1.0);
  EXPECT_EQ(g0.params.mean, p0.mean);
  EXPECT_EQ(g0.params.covariance.dense(), p0.covariance.dense());
  EXPECT_EQ(g1.params.mean, p1.mean);
  EXPECT_EQ(g1.params.covariance.dense(), p1.covariance.dense());
  EXPECT_THROW(gaussian_geodesic(p0, p1, -0.1), InvalidArgument);
  EXPECT_THROW(gaussian_geodesic(p0, p1, 1.1), InvalidArgument);
}

TEST(Geodesic, SymmetricMidpointAndQuarter) {
  Vector mu(2);
  mu << 1.0, -0.5;
  const GaussianParams neg(-mu, SpdMatrix::isotropic(2, 0.8)), pos(mu, SpdMatrix::isotropic(2, 0.8));
  const auto mid = gaussian_geodesic(neg, pos, 0.5);
  EXPECT_LE(mid.params.mean.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((mid.params.covariance.dense() - 0.8 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(),
            1e-12);
  const auto q = gaussian_geodesic(neg, pos, 0.25);
  EXPECT_LE((q.params.mean - (-mu + 0.25 * 2.0 * mu)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(w2_gaussian(neg, q.params), 0.25 * w2_gaussian(neg, pos), 1e-8);
}

TEST(Geodesic, ConstantSpeedForGeneralCovariances) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p0 = random_full(3, rng), p1 = random_full(3, rng);
    const double total = w2_gaussian(p0, p1);
    for (double s : {0.0, 0.2, 0.5}) {
      for (double t : {0.3, 0.7, 1.0}) {
        const auto a = gaussian_geodesic(p0, p1, s).params;
        const auto b = gaussian_geodesic(p0, p1, t).params;
        EXPECT_NEAR(w2_gaussian(a, b), std::abs(t - s) * total, 1e-8);
      }
    }
  }
}

TEST(Geodesic, MidpointMinimizesTheBarycenterObjective) {
  Rng rng(9);
  const GaussianParams p0(random_vector(2, rng), SpdMatrix::isotropic(2, 0.5));
  const GaussianParams p1(random_vector(2, rng), SpdMatrix::isotropic(2, 3.0));
  const auto mid = gaussian_geodesic(p0, p1, 0.5).params;
  auto objective = [&](const GaussianParams& g) {
    return 0.5 * w2_gaussian_squared(g, p0) + 0.5 * w2_gaussian_squared(g, p1);
  };
  const double best = objective(mid);
  for (int i = -5; i <= 5; ++i) {
    for (int j = -5; j <= 5; ++j) {
      for (int k = -5; k <= 5; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        Vector m = mid.mean;
        m(0) += 0.05 * i;
        m(1) += 0.05 * j;
        const double sd = std::sqrt(mid.covariance.trace() / 2.0) + 0.05 * k;
        const GaussianParams g(m, SpdMatrix::isotropic(2, sd * sd));
        EXPECT_GT(objective(g), best);
      }
    }
  }
}

TEST(AugmentedPair, Examples) {
  const auto model = ConditionalGaussianModel::axis_aligned(3, 2.0, 0.5);
  const auto p0 = augmented_gaussian_pair(model, 0.0);
  EXPECT_DOUBLE_EQ(p0.r, 1.0);
  EXPECT_EQ(p0.positive.mean, model.mu());
  EXPECT_EQ(p0.negative.mean, Vector(-model.mu()));
  const auto q = augmented_gaussian_pair(model, 0.25);
  EXPECT_DOUBLE_EQ(q.r, 0.5);
  EXPECT_LE((q.positive.mean - 0.5 * model.mu()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((q.positive.covariance.dense() - 0.25 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(),
            1e-15);
  EXPECT_THROW(augmented_gaussian_pair(model, 0.5), InvalidArgument);
  EXPECT_THROW(augmented_gaussian_pair(model, -0.1), InvalidArgument);
}

}  // namespace
