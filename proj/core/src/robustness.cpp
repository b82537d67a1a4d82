#include "geoaug/robustness.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "geoaug/csv_writer.hpp"
#include "geoaug/error.hpp"
#include "geoaug/geodesic_augment.hpp"
#include "geoaug/rng.hpp"

namespace geoaug {
namespace {

void check_theory_classifier(const ConditionalGaussianModel& model, const LinearClassifier& clf,
                             const char* who) {
  if (clf.dim() != model.dim()) throw InvalidArgument(std::string(who) + ": dimension mismatch");
  if (clf.beta != 0.0) throw InvalidArgument(std::string(who) + ": classifier must have beta = 0");
  if (clf.theta.norm() == 0.0) throw InvalidArgument(std::string(who) + ": theta must be nonzero");
}

// mu^T theta / (sigma ||theta||)
double margin(const ConditionalGaussianModel& model, const LinearClassifier& clf) {
  return model.mu().dot(clf.theta) / (model.sigma() * clf.theta.norm());
}

ErrorEstimate rate(std::size_t errors, std::size_t n) {
  const double p = static_cast<double>(errors) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

std::size_t count_errors(const LinearClassifier& clf, const Matrix& x, const std::vector<int>& y) {
  const auto pred = clf.predict_rows(x);
  std::size_t e = 0;
  for (std::size_t i = 0; i < y.size(); ++i) e += pred[i] != y[i];
  return e;
}

LabeledDataset empirical_augmentation(const ConditionalGaussianModel& model, std::size_t n1,
                                      double r, const Rng& rng, const SinkhornOptions& opts) {
  const std::size_t m = (n1 + 1) / 2;
  const Matrix neg = sample_gaussian(model.class_conditional(-1), m, rng.split(11).key());
  const Matrix pos = sample_gaussian(model.class_conditional(1), m, rng.split(12).key());
  const BarycentricMap map =
      estimate_map(DiscreteMeasure::uniform(neg), DiscreteMeasure::uniform(pos), opts);
  const double t = 0.5 * (1.0 - r);
  const AugmentationBatch low = interpolate(map, -1, 1, t);
  const AugmentationBatch high = interpolate(map, -1, 1, 1.0 - t);
  const std::size_t n_low = m;
  const std::size_t n_high = n1 - m;
  Matrix x(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(model.dim()));
  std::vector<int> y;
  y.reserve(n1);
  x.topRows(static_cast<Eigen::Index>(n_low)) = low.samples;
  y.insert(y.end(), low.hard_labels.begin(), low.hard_labels.end());
  x.bottomRows(static_cast<Eigen::Index>(n_high)) =
      high.samples.topRows(static_cast<Eigen::Index>(n_high));
  y.insert(y.end(), high.hard_labels.begin(),
           high.hard_labels.begin() + static_cast<std::ptrdiff_t>(n_high));
  return LabeledDataset(std::move(x), std::move(y), LabelMode::binary);
}

double chi_cdf(double radius, std::size_t d) {
  if (radius <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * static_cast<double>(d), 0.5 * radius * radius);
}

}  // namespace

double q_function(double x) {
  if (std::isnan(x)) throw InvalidArgument("q_function: NaN argument");
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double standard_error(const ConditionalGaussianModel& model, const LinearClassifier& clf) {
  check_theory_classifier(model, clf, "standard_error");
  return q_function(margin(model, clf));
}

double linf_robust_error(const ConditionalGaussianModel& model, const LinearClassifier& clf,
                         double eps) {
  check_theory_classifier(model, clf, "linf_robust_error");
  if (!(eps >= 0.0)) throw InvalidArgument("linf_robust_error: eps must be >= 0");
  const double shrink = eps * clf.theta.lpNorm<1>() / (model.sigma() * clf.theta.norm());
  return q_function(margin(model, clf) - shrink);
}

double smoothed_error(const ConditionalGaussianModel& model, const LinearClassifier& clf,
                      double sigma_s, SmoothingForm form) {
  check_theory_classifier(model, clf, "smoothed_error");
  if (!(sigma_s >= 0.0)) throw InvalidArgument("smoothed_error: sigma_s must be >= 0");
  const double s = model.sigma();
  const double scale = form == SmoothingForm::variance ? std::sqrt(s * s + sigma_s * sigma_s)
                                                       : s + sigma_s;
  return q_function(model.mu().dot(clf.theta) / (scale * clf.theta.norm()));
}

RobustnessReport analytic_report(const ConditionalGaussianModel& model, const LinearClassifier& clf,
                                 double eps, double sigma_s, SmoothingForm form) {
  RobustnessReport r;
  r.mode = ReportMode::analytic;
  r.standard = {standard_error(model, clf), 0.0};
  r.robust = ErrorEstimate{linf_robust_error(model, clf, eps), 0.0};
  r.radius = eps;
  r.smoothed = ErrorEstimate{smoothed_error(model, clf, sigma_s, form), 0.0};
  r.sigma_s = sigma_s;
  return r;
}

RobustnessReport monte_carlo_error(const ConditionalGaussianModel& model,
                                   const LinearClassifier& clf, std::size_t n,
                                   std::optional<Attack> attack, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("monte_carlo_error: n must be >= 1");
  if (clf.dim() != model.dim()) throw InvalidArgument("monte_carlo_error: dimension mismatch");
  if (attack && !(attack->size >= 0.0)) {
    throw InvalidArgument("monte_carlo_error: attack size must be >= 0");
  }
  const LabeledDataset data = sample_conditional_gaussian(model, n, seed);
  RobustnessReport r;
  r.mode = ReportMode::monte_carlo;
  r.samples = n;
  r.standard = rate(count_errors(clf, data.features(), data.labels()), n);
  if (!attack || attack->kind == Attack::Kind::none) return r;
  if (attack->kind == Attack::Kind::fgsm) {
    const Matrix adv = fgsm_attack_rows(clf, data.features(), data.labels(), attack->size);
    r.robust = rate(count_errors(clf, adv, data.labels()), n);
    r.radius = attack->size;
  } else {
    Rng noise = Rng(seed).split(1);
    Matrix x = data.features();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) += attack->size * noise.normal();
    }
    r.smoothed = rate(count_errors(clf, x, data.labels()), n);
    r.sigma_s = attack->size;
  }
  return r;
}

Theorem1Trial theorem1_trial(const ConditionalGaussianModel& model, std::size_t n0, std::size_t n1,
                             double r, double eps, std::uint64_t seed,
                             const Theorem1Options& options) {
  if (n0 < 1) throw InvalidArgument("theorem1_trial: n0 must be >= 1");
  if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("theorem1_trial: r must lie in [0, 1]");
  if (!(eps >= 0.0)) throw InvalidArgument("theorem1_trial: eps must be >= 0");
  const Rng rng(seed);
  const LabeledDataset original = sample_conditional_gaussian(model, n0, rng.split(1).key());
  LabeledDataset augmented;
  if (n1 > 0) {
    if (options.source == AugmentSource::analytic) {
      const ConditionalGaussianModel contracted(r * model.mu(), model.sigma());
      augmented = sample_conditional_gaussian(contracted, n1, rng.split(2).key());
    } else {
      augmented = empirical_augmentation(model, n1, r, rng.split(3), options.sinkhorn);
    }
  }
  Theorem1Trial out;
  const LinearClassifier orig = mean_estimator(original);
  const LinearClassifier pooled = pooled_estimator(original, augmented);
  out.pe_orig = linf_robust_error(model, orig, eps);
  out.pe_aug = linf_robust_error(model, pooled, eps);
  out.improved = out.pe_aug < out.pe_orig;
  out.theta_orig = orig.theta;
  out.theta_aug = pooled.theta;
  return out;
}

Theorem1Bound theorem1_bound(const ConditionalGaussianModel& model, std::size_t n0, std::size_t n1,
                             double r) {
  if (n0 < 1) throw InvalidArgument("theorem1_bound: n0 must be >= 1");
  Theorem1Bound b{0.0, 0.0, 0.0, 0.0};
  if (n1 < 2) return b;  // log n1 <= 0 leaves every event empty
  const std::size_t d = model.dim();
  const double sigma = model.sigma();
  const double ln1 = std::log(static_cast<double>(n1));
  const double dn0 = static_cast<double>(n0);
  const double dn1 = static_cast<double>(n1);
  b.p_norm = chi_cdf(ln1 / sigma, d);
  const double a = std::sqrt(dn0) * (r + dn0) / (std::sqrt(dn1) * sigma);
  b.p_a = a <= ln1 ? chi_cdf(ln1, d) - chi_cdf(a, d) : 0.0;
  const double mu2 = model.mu().squaredNorm();
  const double arg = mu2 - dn0 * (r + dn0) * (r + dn0) / (dn1 * sigma * sigma);
  if (arg >= 0.0 && mu2 > 0.0) {
    const double c = std::min(1.0, std::sqrt(arg) / std::sqrt(mu2));  // bound on cos(angle)
    if (d == 1) {
      b.p_b = c >= 1.0 ? 1.0 : (c >= -1.0 ? 0.5 : 0.0);
    } else {
      const double k = 0.5 * static_cast<double>(d - 1);
      b.p_b = boost::math::ibeta(k, k, 0.5 * (c + 1.0));
    }
  }
  b.bound = b.p_norm * b.p_a * b.p_b;
  return b;
}

DroResult dro_worst_case_check(const ConditionalGaussianModel& model, double eps,
                               const DroGrid& grid) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("dro_worst_case_check: eps must be >= 0");
  if (grid.s_points < 1 || (!grid.geodesic_only && grid.v_points < 1)) {
    throw InvalidArgument("dro_worst_case_check: empty grid");
  }
  const double mu = model.mu().norm();
  if (mu == 0.0) throw InvalidArgument("dro_worst_case_check: mu must be nonzero");
  const double sigma = model.sigma();
  const double d = static_cast<double>(model.dim());
  const double half_s = eps / mu;
  const double half_root = eps / (sigma * std::sqrt(d));
  auto axis = [](double centre, double half, std::size_t n, std::size_t k) {
    if (n == 1) return centre;
    return centre - half + 2.0 * half * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  const std::size_t nv = grid.geodesic_only ? 1 : grid.v_points;

  DroResult out{};
  out.step_s = grid.s_points > 1 ? 2.0 * half_s / static_cast<double>(grid.s_points - 1) : 0.0;
  out.expected_s = 1.0 - half_s;
  out.expected_error = q_function((1.0 - eps / mu) * mu / sigma);
  double best = -1.0;
  double best_root = 1.0;
  double best_step_root = nv > 1 ? 2.0 * half_root / static_cast<double>(nv - 1) : 0.0;
  const double slack = 1e-12 * std::max(1.0, eps * eps);
  for (std::size_t i = 0; i < grid.s_points; ++i) {
    const double s = axis(1.0, half_s, grid.s_points, i);
    for (std::size_t k = 0; k < nv; ++k) {
      const double root = grid.geodesic_only ? 1.0 : axis(1.0, half_root, nv, k);
      if (root <= 0.0) continue;
      const double w2 = (1.0 - s) * (1.0 - s) * mu * mu + d * sigma * sigma * (root - 1.0) * (root - 1.0);
      if (w2 > eps * eps + slack) continue;
      ++out.feasible;
      const double err = q_function(s * mu / (root * sigma));
      if (err > best) {
        best = err;
        out.s = s;
        best_root = root;
      }
    }
  }
  if (out.feasible == 0) throw InvalidArgument("dro_worst_case_check: no feasible grid point");
  out.v = best_root * best_root;
  // v-step reported around the optimum: v = root^2 so dv ~ 2 root droot.
  out.step_v = 2.0 * best_root * best_step_root;
  out.error = best;
  return out;
}

void write_theorem1_csv(const std::vector<Theorem1Row>& rows, const std::filesystem::path& path,
                        const std::vector<std::string>& comments) {
  CsvWriter w;
  w.comments(comments);
  w.header({"trial", "n0", "n1", "r", "eps", "pe_orig", "pe_aug", "improved"});
  for (const auto& row : rows) {
    w.field(row.trial).field(row.n0).field(row.n1).field(row.r).field(row.eps);
    w.field(row.result.pe_orig).field(row.result.pe_aug).field(row.result.improved ? 1 : 0);
    w.end_row();
  }
  w.save(path);
}

}  // namespace geoaug
