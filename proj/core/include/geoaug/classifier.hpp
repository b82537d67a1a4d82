#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geoaug/linalg.hpp"
#include "geoaug/measures.hpp"

namespace geoaug {

/// x -> sign(theta^T x + beta), with sign(0) = +1.
struct LinearClassifier {
  Vector theta;
  double beta = 0.0;

  LinearClassifier() = default;
  explicit LinearClassifier(Vector theta_, double beta_ = 0.0);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(theta.size()); }
  double score(const Vector& x) const;
  /// theta^T x_i + beta for every row.
  Vector scores(const Matrix& x) const;
  int predict(const Vector& x) const;
  std::vector<int> predict_rows(const Matrix& x) const;
};

/// CSV with columns (param, value): rows theta0..theta{d-1} then beta.
void save_classifier(const LinearClassifier& clf, const std::filesystem::path& path,
                     const std::vector<std::string>& comments = {});
LinearClassifier load_classifier(const std::filesystem::path& path);

enum class LossKind { zero_one, logistic, linear_yfx };

LossKind parse_loss(const std::string& name);
std::string loss_name(LossKind loss);

/// Loss of score s against a label y in [-1, 1] with its partial derivatives.
/// logistic: p = (1 + y) / 2, l = p softplus(-s) + (1 - p) softplus(s).
/// linear_yfx: l = -y s.
/// zero_one: 1[sign(s) != sign(y)] with sign(0) = +1; derivatives are zero.
struct LossValue {
  double value;
  double d_score;
  double d_label;
  double d2_score;        ///< d^2 l / ds^2
  double d2_score_label;  ///< d^2 l / ds dy
};
LossValue evaluate_loss(LossKind loss, double score, double label);

/// Mean loss of `clf` on rows of `x` against `labels`.
double mean_loss(const LinearClassifier& clf, LossKind loss, const Matrix& x, const Vector& labels);

/// Features paired with real-valued labels in [-1, 1] (augmented samples).
struct SoftLabeledData {
  Matrix features;
  Vector labels;

  static SoftLabeledData from(const LabeledDataset& data);
  std::size_t size() const noexcept { return static_cast<std::size_t>(labels.size()); }
};

/// theta = (1/n) sum y_i x_i, beta = 0.
LinearClassifier mean_estimator(const LabeledDataset& data);
/// (sum y_i x_i + sum y~_i x~_i) / (n0 + n1), beta = 0.
LinearClassifier pooled_estimator(const LabeledDataset& original, const LabeledDataset& augmented);

/// Differentiable penalty P(theta, beta) added to the training objective.
class Penalty {
 public:
  virtual ~Penalty() = default;
  virtual double value(const LinearClassifier& clf) const = 0;
  /// Writes dP/dtheta and dP/dbeta.
  virtual void gradient(const LinearClassifier& clf, Vector& d_theta, double& d_beta) const = 0;
};

struct TrainConfig {
  LossKind loss = LossKind::logistic;
  double lambda1 = 0.0;  ///< weight of P^2 / 2
  double lambda2 = 0.0;  ///< weight of ||theta||^2 / 2
  double alpha_reg = 5.0;  ///< weight of P
  std::size_t steps = 2000;
  double learning_rate = 0.1;
};

/// Full-batch gradient descent from theta = 0 on
///   mean loss over data and augmented rows + alpha_reg P + (lambda1 / 2) P^2
///   + (lambda2 / 2) ||theta||^2.
/// Penalty terms apply only when `penalty` is given. The intercept is trained for the
/// logistic loss only. Rejects zero_one (not differentiable) and linear_yfx with
/// lambda2 = 0 (unbounded below).
LinearClassifier train(const LabeledDataset& data, const std::optional<SoftLabeledData>& augmented,
                       const TrainConfig& config, const Penalty* penalty = nullptr);

/// Value of the training objective at `clf`, as minimized by train().
double training_objective(const LinearClassifier& clf, const LabeledDataset& data,
                          const std::optional<SoftLabeledData>& augmented,
                          const TrainConfig& config, const Penalty* penalty = nullptr);

/// Worst-case l_inf perturbation for a linear model: x - radius * y * sign(theta),
/// with sign(0) = 0.
Vector fgsm_attack(const LinearClassifier& clf, const Vector& x, int y, double radius);
Matrix fgsm_attack_rows(const LinearClassifier& clf, const Matrix& x, const std::vector<int>& y,
                        double radius);

}  // namespace geoaug
