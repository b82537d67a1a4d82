#include <memory>
#include <ostream>

#include "common.hpp"
#include "geoaug/cli/commands.hpp"
#include "geoaug/csv_writer.hpp"
#include "geoaug/dataset_csv.hpp"
#include "geoaug/geodesic_augment.hpp"
#include "geoaug/geodesic_regularizer.hpp"
#include "geoaug/rng.hpp"
#include "geoaug/robustness.hpp"

namespace geoaug::cli {
namespace {

LabeledDataset load_binary(const Config& c) {
  const std::string input = c.get_string("input");
  if (input.empty()) throw UsageError("config key 'input': a dataset CSV is required");
  LabeledDataset data = load_csv(input);
  if (data.mode() != LabelMode::binary) {
    throw UsageError("config key 'input': labels must be -1/+1 for a linear classifier");
  }
  return data;
}

void run_train(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const LabeledDataset data = load_binary(c);
  const Rng base(c.get_u64("seed"));
  TrainConfig tc;
  tc.loss = parse_loss(c.get_string("loss"));
  tc.lambda1 = c.get_nonnegative("lambda1");
  tc.lambda2 = c.get_nonnegative("lambda2");
  tc.alpha_reg = c.get_nonnegative("alpha_reg");
  tc.steps = c.get_count("steps");
  tc.learning_rate = c.get_positive("learning_rate");
  const SinkhornOptions sk = sinkhorn_from(c);
  const std::size_t t_points = c.get_count("t_points");
  if (t_points < 2) throw UsageError("config key 't_points': must be >= 2");

  std::unique_ptr<Penalty> penalty;
  const std::string kind = c.get_string("penalty");
  if (kind == "geodesic") {
    const auto classes = split_by_class(data);
    if (classes.size() < 2) throw UsageError("config key 'input': dataset has a single class");
    const BarycentricMap map = estimate_map(classes.at(-1), classes.at(1), sk);
    penalty = std::make_unique<GeodesicPenalty>(
        std::vector<GeodesicSegment>{GeodesicSegment::from(map, -1, 1)}, tc.loss,
        uniform_grid(t_points));
  } else if (kind != "none") {
    throw UsageError("config key 'penalty': expected none or geodesic (got '" + kind + "')");
  }

  std::optional<SoftLabeledData> augmented;
  if (c.get_bool("augment")) {
    TrainConfig warm = tc;
    warm.lambda1 = 0.0;
    const LinearClassifier erm = train(data, std::nullopt, warm);
    AugmentConfig ac;
    ac.batch_size = c.get_count("batch_size");
    ac.magnification = c.get_nonnegative("magnification");
    ac.t_count = t_points;
    ac.sinkhorn = sk;
    ac.seed = base.split(1).key();
    augmented = stack_batches(augment_batches(data, classifier_objective(erm, tc.loss), ac),
                              data.dim());
  }
  const LinearClassifier clf = train(data, augmented, tc, penalty.get());
  save_classifier(clf, out / "classifier.csv", c.echo());
  log << "objective " << short_number(training_objective(clf, data, augmented, tc, penalty.get()))
      << "\n";
}

void run_eval(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const std::string path = c.get_string("classifier");
  if (path.empty()) throw UsageError("config key 'classifier': a classifier CSV is required");
  const LinearClassifier clf = load_classifier(path);
  const auto model = ConditionalGaussianModel::axis_aligned(clf.dim(), c.get_nonnegative("mu_norm"),
                                                            c.get_positive("sigma"));
  const double eps = c.get_nonnegative("eps");
  const double sigma_s = c.get_nonnegative("sigma_s");
  const std::string form_name = c.get_string("smoothing_form");
  SmoothingForm form = SmoothingForm::variance;
  if (form_name == "sum_of_scales") {
    form = SmoothingForm::sum_of_scales;
  } else if (form_name != "variance") {
    throw UsageError("config key 'smoothing_form': expected variance or sum_of_scales (got '" +
                     form_name + "')");
  }
  const Rng base(c.get_u64("seed"));

  CsvWriter csv;
  csv.comments(c.echo());
  csv.header({"metric", "mode", "value", "se"});
  auto row = [&](const char* metric, const char* mode, const ErrorEstimate& e) {
    csv.field(metric).field(mode).field(e.value).field(e.se);
    csv.end_row();
    log << metric << " (" << mode << "): " << short_number(e.value) << "\n";
  };
  if (clf.beta == 0.0 && clf.theta.norm() > 0.0) {
    const auto r = analytic_report(model, clf, eps, sigma_s, form);
    row("standard", "analytic", r.standard);
    row("linf_robust", "analytic", *r.robust);
    row("smoothed", "analytic", *r.smoothed);
  } else {
    log << "closed forms need beta = 0 and theta != 0; reporting Monte Carlo only\n";
  }
  if (const std::size_t mc = c.get_count("mc_samples"); mc > 0) {
    const auto fgsm = monte_carlo_error(model, clf, mc, Attack::fgsm(eps), base.split(1).key());
    const auto noisy =
        monte_carlo_error(model, clf, mc, Attack::gaussian(sigma_s), base.split(2).key());
    row("standard", "monte_carlo", fgsm.standard);
    row("linf_robust", "monte_carlo", *fgsm.robust);
    row("smoothed", "monte_carlo", *noisy.smoothed);
  }
  if (const std::string input = c.get_string("input"); !input.empty()) {
    const LabeledDataset data = load_binary(c);
    if (data.dim() != clf.dim()) throw UsageError("config key 'input': dimension mismatch");
    const Vector y = SoftLabeledData::from(data).labels;
    const Matrix adv = fgsm_attack_rows(clf, data.features(), data.labels(), eps);
    const double n = static_cast<double>(data.size());
    auto estimate = [n](double p) { return ErrorEstimate{p, std::sqrt(p * (1.0 - p) / n)}; };
    row("standard", "dataset", estimate(mean_loss(clf, LossKind::zero_one, data.features(), y)));
    row("linf_robust", "dataset", estimate(mean_loss(clf, LossKind::zero_one, adv, y)));
  }
  csv.save(out / "eval.csv");
}

}  // namespace

Command train_command() {
  return {"train",
          "Train a linear classifier with optional augmentation and geodesic penalty",
          {{"input", "", "dataset CSV with -1/+1 labels"},
           {"loss", "logistic", "logistic or linear_yfx"},
           {"lambda1", "0", "weight of the squared penalty"},
           {"lambda2", "0.01", "weight of ||theta||^2 / 2"},
           {"alpha_reg", "5", "weight of the penalty"},
           {"penalty", "none", "none or geodesic"},
           {"augment", "false", "add worst-case geodesic samples"},
           {"steps", "2000", "gradient steps"},
           {"learning_rate", "0.1", "gradient step size"},
           {"t_points", "21", "geodesic grid size"},
           {"batch_size", "64", "points per class in each augmentation batch"},
           {"magnification", "1", "augmented samples per original sample"},
           {"sinkhorn_eps", "0.01", "entropic coefficient"},
           {"sinkhorn_max_iter", "10000", "Sinkhorn iteration cap"}},
          run_train};
}

Command eval_command() {
  return {"eval",
          "Standard, l_inf robust and smoothed errors of a linear classifier",
          {{"classifier", "", "classifier CSV"},
           {"mu_norm", "1", "norm of the class mean mu = mu_norm * e1"},
           {"sigma", "1", "class noise standard deviation"},
           {"eps", "0.1", "l_inf attack radius"},
           {"sigma_s", "0.5", "smoothing noise standard deviation"},
           {"smoothing_form", "variance", "variance or sum_of_scales"},
           {"mc_samples", "0", "Monte Carlo samples (0 skips)"},
           {"input", "", "optional dataset CSV to score"}},
          run_eval};
}

}  // namespace geoaug::cli
