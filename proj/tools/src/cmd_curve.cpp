#include <ostream>

#include "common.hpp"
#include "geoaug/cli/commands.hpp"
#include "geoaug/csv_writer.hpp"
#include "geoaug/geodesic_augment.hpp"
#include "geoaug/geodesic_regularizer.hpp"
#include "geoaug/rng.hpp"
#include "geoaug/robustness.hpp"

namespace geoaug::cli {
namespace {

struct Strategy {
  std::string name;
  LinearClassifier clf;
};

void run_curve(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const auto model = model_from(c);
  const std::size_t n = c.get_count("n");
  if (n < 4) throw UsageError("config key 'n': must be >= 4");
  const LossKind loss = parse_loss(c.get_string("loss"));
  if (loss == LossKind::zero_one) throw UsageError("config key 'loss': zero_one cannot be trained");
  const std::size_t t_points = c.get_count("t_points");
  if (t_points < 2) throw UsageError("config key 't_points': must be >= 2");
  const auto grid = uniform_grid(t_points);
  const Rng base(c.get_u64("seed"));

  TrainConfig tc;
  tc.loss = loss;
  tc.lambda1 = c.get_nonnegative("lambda1");
  tc.lambda2 = c.get_nonnegative("lambda2");
  tc.alpha_reg = c.get_nonnegative("alpha_reg");
  tc.steps = c.get_count("steps");
  tc.learning_rate = c.get_positive("learning_rate");

  const LabeledDataset data = sample_conditional_gaussian(model, n, base.split(1).key());
  const auto classes = split_by_class(data);
  if (classes.size() < 2) throw UsageError("config key 'n': sample drew a single class");
  const SinkhornOptions sk = sinkhorn_from(c);
  const BarycentricMap map = estimate_map(classes.at(-1), classes.at(1), sk);
  const GeodesicSegment seg = GeodesicSegment::from(map, -1, 1);
  const GeodesicPenalty penalty({seg}, loss, grid);

  std::vector<Strategy> strategies;
  strategies.push_back({"erm", train(data, std::nullopt, tc)});
  strategies.push_back({"erm_reg", train(data, std::nullopt, tc, &penalty)});

  AugmentConfig ac;
  ac.batch_size = c.get_count("batch_size");
  ac.magnification = c.get_nonnegative("magnification");
  ac.t_count = t_points;
  ac.sinkhorn = sk;
  ac.seed = base.split(2).key();
  const auto batches = augment_batches(data, classifier_objective(strategies[0].clf, loss), ac);
  const auto augmented = stack_batches(batches, data.dim());
  strategies.push_back({"erm_da", train(data, augmented, tc)});
  strategies.push_back({"erm_da_reg", train(data, augmented, tc, &penalty)});

  const auto comments = c.echo();
  const double eps = c.get_nonnegative("eps");
  const std::size_t mc = c.get_count("mc_samples");
  if (mc < 1) throw UsageError("config key 'mc_samples': must be >= 1");

  CsvWriter curve;
  curve.comments(comments);
  curve.header({"strategy", "t", "loss", "dloss_dt"});
  CsvWriter summary;
  summary.comments(comments);
  summary.header({"strategy", "regularizer", "total_variation", "ratio_to_erm", "clean_error",
                  "robust_error"});
  double erm_reg = 0.0;
  for (const auto& s : strategies) {
    const auto g = performance_geodesic(s.clf, seg, loss, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      curve.field(s.name).field(g.t[k]).field(g.loss[k]).field(g.dloss_dt[k]);
      curve.end_row();
    }
    const double reg = smoothness_regularizer(s.clf, seg, loss, grid);
    if (s.name == "erm") erm_reg = reg;
    const double tv = total_variation_regularizer(s.clf, seg, loss, grid);
    const auto mc_report = monte_carlo_error(model, s.clf, mc, Attack::fgsm(eps), base.split(3).key());
    summary.field(s.name).field(reg).field(tv).field(erm_reg > 0.0 ? reg / erm_reg : 1.0);
    summary.field(mc_report.standard.value).field(mc_report.robust->value);
    summary.end_row();
    log << s.name << ": regularizer " << short_number(reg) << "\n";
  }
  curve.save(out / "curve.csv");
  summary.save(out / "curve_summary.csv");
}

}  // namespace

Command curve_command() {
  return {"curve",
          "Performance geodesic R(t) of ERM, ERM+reg, ERM+da and ERM+da+reg",
          join(model_keys("2"),
               {{"n", "400", "training sample count"},
                {"loss", "logistic", "training loss: logistic or linear_yfx"},
                {"lambda1", "0", "weight of the squared regularizer"},
                {"lambda2", "0.01", "weight of ||theta||^2 / 2"},
                {"alpha_reg", "0.2", "weight of the regularizer"},
                {"steps", "2000", "gradient steps"},
                {"learning_rate", "0.1", "gradient step size"},
                {"t_points", "21", "geodesic grid size"},
                {"batch_size", "64", "points per class in each augmentation batch"},
                {"magnification", "1", "augmented samples per original sample"},
                {"sinkhorn_eps", "0.01", "entropic coefficient"},
                {"sinkhorn_max_iter", "10000", "Sinkhorn iteration cap"},
                {"eps", "0.1", "l_inf attack radius for the robust error"},
                {"mc_samples", "20000", "Monte Carlo samples for the error columns"}}),
          run_curve};
}

}  // namespace geoaug::cli
