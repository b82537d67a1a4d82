#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geoaug/classifier.hpp"
#include "geoaug/entropic_ot.hpp"
#include "geoaug/measures.hpp"

namespace geoaug {

/// Gaussian upper tail P(Z > x). NaN throws.
double q_function(double x);

/// Variance of the smoothed input: sigma^2 + sigma_s^2 (`variance`), or the
/// (sigma + sigma_s)^2 form kept for comparison (`sum_of_scales`).
enum class SmoothingForm { variance, sum_of_scales };

// Closed forms for the conditional Gaussian model and a homogeneous linear classifier
// (beta = 0, theta != 0).
double standard_error(const ConditionalGaussianModel& model, const LinearClassifier& clf);
/// Q(mu^T theta / (sigma ||theta||) - eps ||theta||_1 / (sigma ||theta||)).
double linf_robust_error(const ConditionalGaussianModel& model, const LinearClassifier& clf,
                         double eps);
double smoothed_error(const ConditionalGaussianModel& model, const LinearClassifier& clf,
                      double sigma_s, SmoothingForm form = SmoothingForm::variance);

enum class ReportMode { analytic, monte_carlo };

struct ErrorEstimate {
  double value = 0.0;
  double se = 0.0;  ///< sqrt(p (1 - p) / n); zero for analytic values
};

struct RobustnessReport {
  ReportMode mode = ReportMode::analytic;
  std::size_t samples = 0;
  ErrorEstimate standard;
  std::optional<ErrorEstimate> robust;  ///< under an l_inf attack of `radius`
  double radius = 0.0;
  std::optional<ErrorEstimate> smoothed;  ///< under N(0, sigma_s^2 I) input noise
  double sigma_s = 0.0;
};

struct Attack {
  enum class Kind { none, fgsm, gaussian };
  Kind kind = Kind::none;
  double size = 0.0;  ///< l_inf radius or noise standard deviation

  static Attack fgsm(double radius) { return {Kind::fgsm, radius}; }
  static Attack gaussian(double sigma_s) { return {Kind::gaussian, sigma_s}; }
};

RobustnessReport analytic_report(const ConditionalGaussianModel& model, const LinearClassifier& clf,
                                 double eps, double sigma_s,
                                 SmoothingForm form = SmoothingForm::variance);

/// Error rates on n fresh samples: always the clean error, plus the attacked error when
/// an attack is given. Deterministic in `seed`.
RobustnessReport monte_carlo_error(const ConditionalGaussianModel& model,
                                   const LinearClassifier& clf, std::size_t n,
                                   std::optional<Attack> attack, std::uint64_t seed);

enum class AugmentSource { analytic, empirical };

struct Theorem1Options {
  AugmentSource source = AugmentSource::analytic;
  SinkhornOptions sinkhorn;  ///< used by the empirical source
};

struct Theorem1Trial {
  double pe_orig;
  double pe_aug;
  bool improved;  ///< pe_aug < pe_orig
  Vector theta_orig;
  Vector theta_aug;
};

/// One trial: n0 samples from the model, n1 augmented samples at contraction r
/// (N(y r mu, sigma^2 I) drawn directly, or produced by barycentric maps between
/// fresh class samples at t = (1 - r) / 2 and 1 - t), then the l_inf robust errors
/// of the mean and pooled estimators.
Theorem1Trial theorem1_trial(const ConditionalGaussianModel& model, std::size_t n0, std::size_t n1,
                             double r, double eps, std::uint64_t seed,
                             const Theorem1Options& options = {});

/// Probability lower bound attached to the improvement event, evaluated as stated:
/// P(||X|| <= log(n1) / sigma) P(A) P(B) for X ~ N(0, I_d), where
/// A = {a <= ||X|| <= log n1}, a = sqrt(n0) (r + n0) / (sqrt(n1) sigma), and
/// B = {mu^T X / ||X|| <= sqrt(||mu||^2 - n0 (r + n0)^2 / (n1 sigma^2))}.
/// A and B are independent because the norm and direction of X are.
struct Theorem1Bound {
  double p_norm;
  double p_a;
  double p_b;
  double bound;
};
Theorem1Bound theorem1_bound(const ConditionalGaussianModel& model, std::size_t n0, std::size_t n1,
                             double r);

struct DroGrid {
  std::size_t s_points = 201;
  std::size_t v_points = 201;
  /// Only pairs on the geodesic (unit scale v = 1) when set.
  bool geodesic_only = false;
};

struct DroResult {
  double s;      ///< worst-case mean shift
  double v;      ///< worst-case variance scale
  double error;  ///< 0-1 error of sign(mu^T x) at (s, v)
  double step_s;
  double step_v;
  std::size_t feasible;
  double expected_s;      ///< 1 - eps / ||mu||
  double expected_error;  ///< Q((1 - eps) ||mu|| / sigma)
};

/// Grid search over symmetric pairs N(-s mu, v sigma^2 I), N(s mu, v sigma^2 I) with
/// (1 - s)^2 ||mu||^2 + d sigma^2 (sqrt(v) - 1)^2 <= eps^2 for the pair maximizing the
/// error Q(s ||mu|| / (sqrt(v) sigma)) of the classifier sign(mu^T x). s spans
/// 1 +- eps / ||mu|| and sqrt(v) spans 1 +- eps / (sigma sqrt(d)). Ties keep the
/// smallest s, then the smallest v.
DroResult dro_worst_case_check(const ConditionalGaussianModel& model, double eps,
                               const DroGrid& grid = {});

/// CSV with columns trial, n0, n1, r, eps, pe_orig, pe_aug, improved.
struct Theorem1Row {
  std::size_t trial;
  std::size_t n0;
  std::size_t n1;
  double r;
  double eps;
  Theorem1Trial result;
};
void write_theorem1_csv(const std::vector<Theorem1Row>& rows, const std::filesystem::path& path,
                        const std::vector<std::string>& comments = {});

}  // namespace geoaug
