#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "geoaug/classifier.hpp"
#include "geoaug/error.hpp"
#include "geoaug/geodesic_regularizer.hpp"
#include "geoaug/measures.hpp"
#include "geoaug/rng.hpp"
#include "oracles.hpp"

using namespace geoaug;

namespace {

Vector random_vector(std::size_t d, Rng& rng) {
  Vector v(d);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v;
}

LabeledDataset one_point(const Vector& x, int y) {
  return LabeledDataset(Matrix(x.transpose()), {y}, LabelMode::binary);
}

TEST(LinearClassifier, SignTieAndScaleInvariance) {
  Vector theta(2);
  theta << 1.0, -2.0;
  const LinearClassifier clf(theta);
  Vector x(2);
  x << 2.0, 1.0;
  EXPECT_EQ(clf.score(x), 0.0);
  EXPECT_EQ(clf.predict(x), 1);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vector z = random_vector(2, rng);
    const double c = 0.01 + 10.0 * rng.uniform();
    EXPECT_EQ(clf.predict(z), LinearClassifier(c * theta).predict(z));
  }
  EXPECT_THROW(LinearClassifier{Vector()}, InvalidArgument);
  EXPECT_THROW(clf.score(Vector::Zero(3)), InvalidArgument);
}

TEST(LinearClassifier, SaveLoadRoundTrip) {
  Vector theta(3);
  theta << 0.1, -1.0 / 3.0, 2e-300;
  const LinearClassifier clf(theta, -0.25);
  const auto path = std::filesystem::temp_directory_path() / "geoaug_clf.csv";
  save_classifier(clf, path, {"trained"});
  const auto back = load_classifier(path);
  EXPECT_EQ(back.theta, clf.theta);
  EXPECT_EQ(back.beta, clf.beta);
  {
    std::ofstream out(path);
    out << "param,value\ntheta0,abc\nbeta,0\n";
  }
  EXPECT_THROW(load_classifier(path), ParseError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_classifier(path), ParseError);
}

TEST(Loss, NamesRoundTrip) {
  for (LossKind k : {LossKind::zero_one, LossKind::logistic, LossKind::linear_yfx})
    EXPECT_EQ(parse_loss(loss_name(k)), k);
  EXPECT_THROW(parse_loss("hinge"), InvalidArgument);
}

TEST(Loss, DerivativesMatchCentralDifferences) {
  Rng rng(2);
  for (LossKind k : {LossKind::logistic, LossKind::linear_yfx}) {
    for (int i = 0; i < 20; ++i) {
      const double s = 4.0 * rng.normal();
      const double y = 2.0 * rng.uniform() - 1.0;
      const auto l = evaluate_loss(k, s, y);
      const double ds = oracle::central_difference(
          [&](double v) { return evaluate_loss(k, v, y).value; }, s, 1e-5);
      const double dy = oracle::central_difference(
          [&](double v) { return evaluate_loss(k, s, v).value; }, y, 1e-5);
      const double d2 = oracle::central_difference(
          [&](double v) { return evaluate_loss(k, v, y).d_score; }, s, 1e-5);
      const double dsy = oracle::central_difference(
          [&](double v) { return evaluate_loss(k, s, v).d_score; }, y, 1e-5);
      EXPECT_NEAR(l.d_score, ds, 1e-7);
      EXPECT_NEAR(l.d_label, dy, 1e-7);
      EXPECT_NEAR(l.d2_score, d2, 1e-7);
      EXPECT_NEAR(l.d2_score_label, dsy, 1e-7);
    }
  }
}

TEST(Loss, ZeroOneUsesTheTieRule) {
  EXPECT_EQ(evaluate_loss(LossKind::zero_one, 0.0, 1.0).value, 0.0);
  EXPECT_EQ(evaluate_loss(LossKind::zero_one, 0.0, -1.0).value, 1.0);
  EXPECT_EQ(evaluate_loss(LossKind::zero_one, -0.1, -1.0).value, 0.0);
  EXPECT_NEAR(evaluate_loss(LossKind::logistic, 0.0, 1.0).value, std::log(2.0), 1e-15);
  EXPECT_GT(evaluate_loss(LossKind::logistic, 800.0, -1.0).value, 799.0);
  EXPECT_TRUE(std::isfinite(evaluate_loss(LossKind::logistic, -800.0, -1.0).value));
}

TEST(MeanEstimator, Examples) {
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  EXPECT_EQ(mean_estimator(one_point(x, 1)).theta, x);
  EXPECT_EQ(mean_estimator(one_point(x, 1)).beta, 0.0);

  Rng rng(3);
  Matrix f(10, 3);
  std::vector<int> y(10);
  for (int i = 0; i < 5; ++i) {
    f.row(i) = random_vector(3, rng).transpose();
    y[i] = rng.sign();
    f.row(i + 5) = -f.row(i);
    y[i + 5] = -y[i];
  }
  const LabeledDataset half(f.topRows(5), std::vector<int>(y.begin(), y.begin() + 5), LabelMode::binary);
  const LabeledDataset both(f, y, LabelMode::binary);
  EXPECT_LE((mean_estimator(half).theta - mean_estimator(both).theta).cwiseAbs().maxCoeff(), 1e-15);

  const auto model = ConditionalGaussianModel::axis_aligned(4, 1.0, 1.0);
  const auto data = sample_conditional_gaussian(model, 10000, 5);
  EXPECT_LE((mean_estimator(data).theta - model.mu()).norm(), 4.0 * std::sqrt(4.0 / 10000.0));
  EXPECT_THROW(mean_estimator(LabeledDataset()), InvalidArgument);
}

TEST(PooledEstimator, Examples) {
  const auto model = ConditionalGaussianModel::axis_aligned(3, 1.0, 1.0);
  const auto a = sample_conditional_gaussian(model, 20, 1);
  EXPECT_EQ(pooled_estimator(a, LabeledDataset()).theta, mean_estimator(a).theta);
  EXPECT_LE((pooled_estimator(a, a).theta - mean_estimator(a).theta).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(pooled_estimator(LabeledDataset(), LabeledDataset()), InvalidArgument);
}

TEST(PooledEstimator, ExpectationIsTheWeightedMeanShift) {
  const auto model = ConditionalGaussianModel::axis_aligned(2, 1.0, 1.0);
  const ConditionalGaussianModel shrunk(0.9 * model.mu(), 1.0);
  const int trials = 2000;
  Vector sum = Vector::Zero(2), sum2 = Vector::Zero(2);
  for (int k = 0; k < trials; ++k) {
    const auto orig = sample_conditional_gaussian(model, 20, 2 * k + 1);
    const auto aug = sample_conditional_gaussian(shrunk, 200, 2 * k + 2);
    const Vector th = pooled_estimator(orig, aug).theta;
    sum += th;
    sum2 += th.cwiseProduct(th);
  }
  const Vector mean = sum / trials;
  const Vector var = sum2 / trials - mean.cwiseProduct(mean);
  const Vector expected = (20.0 + 200.0 * 0.9) / 220.0 * model.mu();
  for (int j = 0; j < 2; ++j)
    EXPECT_LE(std::abs(mean(j) - expected(j)), 3.0 * std::sqrt(var(j) / trials));
}

TrainConfig projection_config(double l1, double l2) {
  TrainConfig c;
  c.loss = LossKind::linear_yfx;
  c.lambda1 = l1;
  c.lambda2 = l2;
  c.alpha_reg = 0.0;
  c.steps = 5000;
  c.learning_rate = 0.1;
  return c;
}

TEST(Train, ProjectionObjectiveReachesItsClosedForm) {
  Rng rng(4);
  for (auto [l1, l2] : {std::pair{0.0, 1.0}, std::pair{1.0, 1.0}, std::pair{5.0, 0.5}}) {
    const Vector mu = random_vector(10, rng).normalized();
    const ProjectionPenalty penalty(mu);
    const auto clf = train(one_point(mu, 1), std::nullopt, projection_config(l1, l2), &penalty);
    EXPECT_LE((clf.theta - oracle::ridge_projection_optimum(mu, l1, l2)).norm(), 1e-4);
    EXPECT_EQ(clf.beta, 0.0);
  }
  Vector mu = Vector::Zero(3);
  mu(0) = 1.0;
  const ProjectionPenalty penalty(mu);
  const auto half = train(one_point(mu, 1), std::nullopt, projection_config(1.0, 1.0), &penalty);
  EXPECT_LE((half.theta - 0.5 * mu).norm(), 1e-4);
}

TEST(Train, EmpiricalMeanVersion) {
  const auto model = ConditionalGaussianModel::axis_aligned(3, 1.0, 1.0);
  const auto data = sample_conditional_gaussian(model, 500, 9);
  const Vector mu_hat = mean_estimator(data).theta;
  const ProjectionPenalty penalty(mu_hat);
  const auto clf = train(data, std::nullopt, projection_config(2.0, 0.7), &penalty);
  EXPECT_LE((clf.theta - oracle::ridge_projection_optimum(mu_hat, 2.0, 0.7)).norm(), 1e-4);
}

TEST(Train, RejectsUnsuitableConfigurations) {
  const auto data = one_point(Vector::Ones(2), 1);
  TrainConfig c;
  c.loss = LossKind::zero_one;
  EXPECT_THROW(train(data, std::nullopt, c), InvalidArgument);
  c.loss = LossKind::linear_yfx;
  c.lambda2 = 0.0;
  EXPECT_THROW(train(data, std::nullopt, c), InvalidArgument);
  c.lambda2 = 1.0;
  c.lambda1 = -1.0;
  EXPECT_THROW(train(data, std::nullopt, c), InvalidArgument);
  c.lambda1 = 0.0;
  c.learning_rate = 0.0;
  EXPECT_THROW(train(data, std::nullopt, c), InvalidArgument);
  c.learning_rate = 0.1;
  EXPECT_THROW(train(LabeledDataset(), std::nullopt, c), InvalidArgument);
}

TEST(Train, LogisticStaysOnTheSymmetryAxis) {
  Matrix x(8, 2);
  x << 1.0, 0.5, 1.0, -0.5, 2.0, 1.5, 2.0, -1.5, -1.0, -0.5, -1.0, 0.5, -2.0, -1.5, -2.0, 1.5;
  const LabeledDataset data(x, {1, 1, 1, 1, -1, -1, -1, -1}, LabelMode::binary);
  TrainConfig c;
  c.steps = 500;
  const auto clf = train(data, std::nullopt, c);
  EXPECT_GT(clf.theta(0), 0.0);
  EXPECT_NEAR(clf.theta(1), 0.0, 1e-12);
  EXPECT_NEAR(clf.beta, 0.0, 1e-12);
}

TEST(Train, LogisticFitsTheInterceptAndLowersTheObjective) {
  Matrix x(6, 1);
  x << 1.0, 1.5, 2.0, 3.0, 3.5, 4.0;
  const LabeledDataset data(x, {-1, -1, -1, 1, 1, 1}, LabelMode::binary);
  TrainConfig c;
  c.lambda2 = 0.01;
  const auto clf = train(data, std::nullopt, c);
  EXPECT_LT(clf.beta, 0.0);
  EXPECT_EQ(clf.predict_rows(x), data.labels());
  const LinearClassifier zero(Vector::Zero(1));
  EXPECT_LT(training_objective(clf, data, std::nullopt, c), training_objective(zero, data, std::nullopt, c));
}

TEST(Train, AugmentedRowsCountInTheMean) {
  const auto data = one_point(Vector::Ones(2), 1);
  SoftLabeledData aug{Matrix(Vector::Ones(2).transpose()), Vector::Constant(1, 1.0)};
  TrainConfig c;
  c.loss = LossKind::linear_yfx;
  c.lambda2 = 1.0;
  const auto a = train(data, std::nullopt, c);
  const auto b = train(data, aug, c);
  EXPECT_LE((a.theta - b.theta).cwiseAbs().maxCoeff(), 1e-12);
  aug.labels(0) = 0.0;
  const auto half = train(data, aug, c);
  EXPECT_LE((half.theta - 0.5 * a.theta).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Fgsm, Examples) {
  Vector theta(2);
  theta << 1.0, 0.0;
  const LinearClassifier clf(theta);
  Vector x(2);
  x << 0.05, 5.0;
  EXPECT_EQ(fgsm_attack(clf, x, 1, 0.0), x);
  const Vector adv = fgsm_attack(clf, x, 1, 0.1);
  EXPECT_NEAR(adv(0), -0.05, 1e-15);
  EXPECT_EQ(adv(1), 5.0);
  EXPECT_EQ(clf.predict(x), 1);
  EXPECT_EQ(clf.predict(adv), -1);
  x(0) = 0.5;
  EXPECT_EQ(clf.predict(fgsm_attack(clf, x, 1, 0.1)), 1);
  EXPECT_THROW(fgsm_attack(clf, x, 1, -0.1), InvalidArgument);
}

TEST(Fgsm, IsTheWorstCaseLinfPerturbation) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const LinearClassifier clf(random_vector(4, rng));
    const Vector x = random_vector(4, rng);
    const int y = rng.sign();
    const double eps = rng.uniform();
    const Vector adv = fgsm_attack(clf, x, y, eps);
    EXPECT_LE((adv - x).cwiseAbs().maxCoeff(), eps + 1e-15);
    const double worst = y * clf.theta.dot(x) - eps * clf.theta.lpNorm<1>();
    EXPECT_NEAR(y * clf.theta.dot(adv), worst, 1e-12);
    for (int k = 0; k < 200; ++k) {
      Vector delta(4);
      for (int j = 0; j < 4; ++j) delta(j) = eps * (2.0 * rng.uniform() - 1.0);
      EXPECT_GE(y * clf.theta.dot(x + delta), worst - 1e-12);
    }
  }
}

TEST(Fgsm, RowsVersionMatchesSingle) {
  Rng rng(7);
  const LinearClassifier clf(random_vector(3, rng));
  Matrix x(5, 3);
  std::vector<int> y(5);
  for (int i = 0; i < 5; ++i) {
    x.row(i) = random_vector(3, rng).transpose();
    y[i] = rng.sign();
  }
  const Matrix adv = fgsm_attack_rows(clf, x, y, 0.3);
  for (int i = 0; i < 5; ++i)
    EXPECT_EQ(Vector(adv.row(i)), fgsm_attack(clf, Vector(x.row(i)), y[i], 0.3));
}

}  // namespace
