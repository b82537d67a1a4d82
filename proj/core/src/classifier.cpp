#include "geoaug/classifier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "geoaug/csv_writer.hpp"
#include "geoaug/error.hpp"

namespace geoaug {
namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_binary(const LabeledDataset& data, const char* who) {
  if (data.mode() != LabelMode::binary) {
    throw InvalidArgument(std::string(who) + ": labels must be binary (-1/+1)");
  }
}

Vector label_weighted_sum(const LabeledDataset& data) {
  Vector s = Vector::Zero(data.features().cols());
  for (std::size_t i = 0; i < data.size(); ++i) {
    s += data.labels()[i] * data.features().row(static_cast<Eigen::Index>(i)).transpose();
  }
  return s;
}

struct Objective {
  double value;
  Vector d_theta;
  double d_beta;
};

// Sum of losses and gradients over rows, accumulated into `obj`.
void accumulate_loss(const LinearClassifier& clf, LossKind loss, const Matrix& x,
                     const Vector& labels, double weight, Objective& obj) {
  const Vector s = clf.scores(x);
  Vector ds(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const LossValue l = evaluate_loss(loss, s(i), labels(i));
    obj.value += weight * l.value;
    ds(i) = weight * l.d_score;
  }
  obj.d_theta.noalias() += x.transpose() * ds;
  obj.d_beta += ds.sum();
}

void check_config(const TrainConfig& config, const Penalty* penalty) {
  if (config.loss == LossKind::zero_one) {
    throw InvalidArgument("train: zero_one loss is not differentiable; use logistic or linear_yfx");
  }
  if (config.lambda1 < 0.0 || config.lambda2 < 0.0) {
    throw InvalidArgument("train: lambda1 and lambda2 must be nonnegative");
  }
  if (config.loss == LossKind::linear_yfx && config.lambda2 == 0.0) {
    throw InvalidArgument(
        "train: linear_yfx loss with lambda2 = 0 is unbounded below; set lambda2 > 0");
  }
  if (penalty && config.alpha_reg < 0.0) throw InvalidArgument("train: alpha_reg must be >= 0");
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("train: learning_rate must be > 0");
}

Objective objective(const LinearClassifier& clf, const LabeledDataset& data,
                    const std::optional<SoftLabeledData>& augmented, const TrainConfig& config,
                    const Penalty* penalty) {
  const std::size_t n = data.size() + (augmented ? augmented->size() : 0);
  Objective obj{0.0, Vector::Zero(clf.theta.size()), 0.0};
  const double w = 1.0 / static_cast<double>(n);
  if (!data.empty()) {
    Vector y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) y(static_cast<Eigen::Index>(i)) = data.labels()[i];
    accumulate_loss(clf, config.loss, data.features(), y, w, obj);
  }
  if (augmented && augmented->size() > 0) {
    accumulate_loss(clf, config.loss, augmented->features, augmented->labels, w, obj);
  }
  if (penalty) {
    const double p = penalty->value(clf);
    Vector gt = Vector::Zero(clf.theta.size());
    double gb = 0.0;
    penalty->gradient(clf, gt, gb);
    const double coef = config.alpha_reg + config.lambda1 * p;
    obj.value += config.alpha_reg * p + 0.5 * config.lambda1 * p * p;
    obj.d_theta += coef * gt;
    obj.d_beta += coef * gb;
  }
  obj.value += 0.5 * config.lambda2 * clf.theta.squaredNorm();
  obj.d_theta += config.lambda2 * clf.theta;
  return obj;
}

}  // namespace

LinearClassifier::LinearClassifier(Vector theta_, double beta_)
    : theta(std::move(theta_)), beta(beta_) {
  if (theta.size() < 1) throw InvalidArgument("LinearClassifier: empty theta");
  if (!theta.allFinite() || !std::isfinite(beta)) {
    throw InvalidArgument("LinearClassifier: non-finite parameters");
  }
}

double LinearClassifier::score(const Vector& x) const {
  if (x.size() != theta.size()) throw InvalidArgument("LinearClassifier: dimension mismatch");
  return theta.dot(x) + beta;
}

Vector LinearClassifier::scores(const Matrix& x) const {
  if (x.cols() != theta.size()) throw InvalidArgument("LinearClassifier: dimension mismatch");
  return (x * theta).array() + beta;
}

int LinearClassifier::predict(const Vector& x) const { return score(x) >= 0.0 ? 1 : -1; }

std::vector<int> LinearClassifier::predict_rows(const Matrix& x) const {
  const Vector s = scores(x);
  std::vector<int> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i) >= 0.0 ? 1 : -1;
  return out;
}

void save_classifier(const LinearClassifier& clf, const std::filesystem::path& path,
                     const std::vector<std::string>& comments) {
  CsvWriter w;
  w.comments(comments);
  w.header({"param", "value"});
  for (Eigen::Index j = 0; j < clf.theta.size(); ++j) {
    w.field("theta" + std::to_string(j)).field(clf.theta(j));
    w.end_row();
  }
  w.field("beta").field(clf.beta);
  w.end_row();
  w.save(path);
}

LinearClassifier load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open classifier file " + path.string(), 0);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<double> theta;
  std::optional<double> beta;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "param,value") throw ParseError("expected header 'param,value'", lineno);
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected 2 fields", lineno);
    const std::string name = line.substr(0, comma);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(line.substr(comma + 1), &used);
      if (used != line.size() - comma - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("non-numeric value for '" + name + "'", lineno);
    }
    if (name == "beta") {
      beta = v;
    } else if (name == "theta" + std::to_string(theta.size())) {
      theta.push_back(v);
    } else {
      throw ParseError("unexpected parameter '" + name + "'", lineno);
    }
  }
  if (theta.empty() || !beta) throw ParseError("classifier needs theta0.. and beta rows", lineno);
  return LinearClassifier(Eigen::Map<Vector>(theta.data(), static_cast<Eigen::Index>(theta.size())),
                          *beta);
}

LossKind parse_loss(const std::string& name) {
  if (name == "zero_one") return LossKind::zero_one;
  if (name == "logistic") return LossKind::logistic;
  if (name == "linear_yfx") return LossKind::linear_yfx;
  throw InvalidArgument("unknown loss '" + name + "' (expected zero_one, logistic or linear_yfx)");
}

std::string loss_name(LossKind loss) {
  switch (loss) {
    case LossKind::zero_one: return "zero_one";
    case LossKind::logistic: return "logistic";
    case LossKind::linear_yfx: return "linear_yfx";
  }
  return "unknown";
}

LossValue evaluate_loss(LossKind loss, double score, double label) {
  switch (loss) {
    case LossKind::zero_one: {
      const double predicted = score >= 0.0 ? 1.0 : -1.0;
      const double target = label >= 0.0 ? 1.0 : -1.0;
      return {predicted == target ? 0.0 : 1.0, 0.0, 0.0, 0.0, 0.0};
    }
    case LossKind::logistic: {
      const double p = 0.5 * (1.0 + label);
      const double sg = sigmoid(score);
      return {p * softplus(-score) + (1.0 - p) * softplus(score), sg - p, -0.5 * score,
              sg * (1.0 - sg), -0.5};
    }
    case LossKind::linear_yfx:
      return {-label * score, -label, -score, 0.0, -1.0};
  }
  throw InvalidArgument("evaluate_loss: unknown loss");
}

double mean_loss(const LinearClassifier& clf, LossKind loss, const Matrix& x, const Vector& labels) {
  if (x.rows() != labels.size()) throw InvalidArgument("mean_loss: row/label count mismatch");
  if (x.rows() == 0) throw InvalidArgument("mean_loss: no rows");
  const Vector s = clf.scores(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += evaluate_loss(loss, s(i), labels(i)).value;
  return total / static_cast<double>(s.size());
}

SoftLabeledData SoftLabeledData::from(const LabeledDataset& data) {
  require_binary(data, "SoftLabeledData");
  Vector y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) y(static_cast<Eigen::Index>(i)) = data.labels()[i];
  return {data.features(), std::move(y)};
}

LinearClassifier mean_estimator(const LabeledDataset& data) {
  if (data.empty()) throw InvalidArgument("mean_estimator: empty dataset");
  require_binary(data, "mean_estimator");
  return LinearClassifier(label_weighted_sum(data) / static_cast<double>(data.size()), 0.0);
}

LinearClassifier pooled_estimator(const LabeledDataset& original, const LabeledDataset& augmented) {
  const std::size_t n = original.size() + augmented.size();
  if (n == 0) throw InvalidArgument("pooled_estimator: both datasets are empty");
  if (!original.empty()) require_binary(original, "pooled_estimator");
  if (!augmented.empty()) require_binary(augmented, "pooled_estimator");
  if (original.empty()) return mean_estimator(augmented);
  if (augmented.empty()) return mean_estimator(original);
  if (original.dim() != augmented.dim()) throw InvalidArgument("pooled_estimator: dimension mismatch");
  return LinearClassifier(
      (label_weighted_sum(original) + label_weighted_sum(augmented)) / static_cast<double>(n), 0.0);
}

LinearClassifier train(const LabeledDataset& data, const std::optional<SoftLabeledData>& augmented,
                       const TrainConfig& config, const Penalty* penalty) {
  check_config(config, penalty);
  if (!data.empty()) require_binary(data, "train");
  const std::size_t n = data.size() + (augmented ? augmented->size() : 0);
  if (n == 0) throw InvalidArgument("train: no training rows");
  const auto d = data.empty() ? augmented->features.cols() : data.features().cols();
  if (augmented && augmented->size() > 0 && augmented->features.cols() != d) {
    throw InvalidArgument("train: augmented data dimension mismatch");
  }
  const bool fit_intercept = config.loss == LossKind::logistic;
  LinearClassifier clf(Vector::Zero(d), 0.0);
  for (std::size_t step = 0; step < config.steps; ++step) {
    const Objective obj = objective(clf, data, augmented, config, penalty);
    if (!obj.d_theta.allFinite() || !std::isfinite(obj.d_beta)) {
      throw NumericalFailure("train: non-finite gradient at step " + std::to_string(step));
    }
    clf.theta -= config.learning_rate * obj.d_theta;
    if (fit_intercept) clf.beta -= config.learning_rate * obj.d_beta;
  }
  return clf;
}

double training_objective(const LinearClassifier& clf, const LabeledDataset& data,
                          const std::optional<SoftLabeledData>& augmented,
                          const TrainConfig& config, const Penalty* penalty) {
  check_config(config, penalty);
  return objective(clf, data, augmented, config, penalty).value;
}

Vector fgsm_attack(const LinearClassifier& clf, const Vector& x, int y, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("fgsm_attack: radius must be >= 0");
  if (x.size() != clf.theta.size()) throw InvalidArgument("fgsm_attack: dimension mismatch");
  Vector out = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) out(j) -= radius * y * sign0(clf.theta(j));
  return out;
}

Matrix fgsm_attack_rows(const LinearClassifier& clf, const Matrix& x, const std::vector<int>& y,
                        double radius) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw InvalidArgument("fgsm_attack: row/label count mismatch");
  }
  if (!(radius >= 0.0)) throw InvalidArgument("fgsm_attack: radius must be >= 0");
  if (x.cols() != clf.theta.size()) throw InvalidArgument("fgsm_attack: dimension mismatch");
  Vector step(clf.theta.size());
  for (Eigen::Index j = 0; j < step.size(); ++j) step(j) = radius * sign0(clf.theta(j));
  Matrix out = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) -= y[static_cast<std::size_t>(i)] * step.transpose();
  return out;
}

}  // namespace geoaug
