#include <map>
#include <ostream>

#include "common.hpp"
#include "geoaug/cli/commands.hpp"
#include "geoaug/dataset_csv.hpp"
#include "geoaug/embedding.hpp"
#include "geoaug/geodesic_augment.hpp"
#include "geoaug/rng.hpp"

namespace geoaug::cli {
namespace {

EmbeddingHook embedding_from(const Config& c, const LabeledDataset& data) {
  const std::string kind = c.get_string("embedding");
  if (kind == "identity") return EmbeddingHook::identity(data.dim());
  if (kind != "pca" && kind != "whiten") {
    throw UsageError("config key 'embedding': expected identity, pca or whiten (got '" + kind +
                     "')");
  }
  std::size_t z = c.get_count("z_dim");
  if (z == 0) z = data.dim();
  if (z > data.dim()) throw UsageError("config key 'z_dim': exceeds the data dimension");
  return EmbeddingHook::fit_pca(data.features(), z, kind == "whiten");
}

// Multiclass default: for the batch's class pair, the hyperplane bisecting the two
// class means, oriented towards the target class.
BatchObjective pair_mean_objective(const LabeledDataset& data, LossKind loss) {
  std::map<int, Vector> means;
  for (const auto& [label, rows] : data.class_rows()) {
    means.emplace(label, data.subset(rows).features().colwise().mean().transpose());
  }
  return [means, loss](const AugmentationBatch& b) {
    const Vector& m0 = means.at(b.source_class);
    const Vector& m1 = means.at(b.target_class);
    const Vector theta = m1 - m0;
    const LinearClassifier clf(theta, -0.5 * theta.dot(m0 + m1));
    return batch_loss(clf, loss, b);
  };
}

void run_augment(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const std::string input = c.get_string("input");
  if (input.empty()) throw UsageError("config key 'input': a dataset CSV is required");
  const LabeledDataset data = load_csv(input);
  if (data.classes().size() < 2) {
    throw UsageError("config key 'input': dataset has a single class");
  }
  const LossKind loss = parse_loss(c.get_string("loss"));
  const Rng base(c.get_u64("seed"));

  AugmentConfig ac;
  ac.batch_size = c.get_count("batch_size");
  ac.magnification = c.get_nonnegative("magnification");
  ac.t_count = c.get_count("t_points");
  const std::string mode = c.get_string("t_mode");
  if (mode == "random") {
    ac.t_mode = TGridMode::random;
  } else if (mode != "grid") {
    throw UsageError("config key 't_mode': expected grid or random (got '" + mode + "')");
  }
  ac.sinkhorn = sinkhorn_from(c);
  ac.seed = base.split(1).key();

  BatchObjective objective;
  const std::string clf_path = c.get_string("classifier");
  if (!clf_path.empty()) {
    if (data.mode() != LabelMode::binary) {
      throw UsageError("config key 'classifier': a linear classifier needs -1/+1 labels");
    }
    objective = classifier_objective(load_classifier(clf_path), loss);
  } else if (data.mode() == LabelMode::binary) {
    TrainConfig tc;
    tc.loss = loss == LossKind::zero_one ? LossKind::logistic : loss;
    tc.lambda2 = c.get_nonnegative("lambda2");
    tc.steps = c.get_count("steps");
    tc.learning_rate = c.get_positive("learning_rate");
    objective = classifier_objective(train(data, std::nullopt, tc), loss);
  } else {
    objective = pair_mean_objective(data, loss);
  }

  const auto batches = augment_batches(data, objective, ac, embedding_from(c, data));
  write_batches_csv(batches, data.dim(), out / "augmented.csv", c.echo());
  std::size_t rows = 0;
  for (const auto& b : batches) rows += b.size();
  log << "augmented " << rows << " samples in " << batches.size() << " batches\n";
}

}  // namespace

Command augment_command() {
  return {"augment",
          "Worst-case geodesic augmentation of a dataset CSV",
          {{"input", "", "dataset CSV (f0..f{d-1}, label)"},
           {"batch_size", "64", "points per class in each batch"},
           {"magnification", "1", "augmented samples per original sample"},
           {"t_points", "21", "geodesic times searched per batch"},
           {"t_mode", "grid", "grid (uniform on [0, 1]) or random"},
           {"sinkhorn_eps", "0.01", "entropic coefficient"},
           {"sinkhorn_max_iter", "10000", "Sinkhorn iteration cap"},
           {"loss", "logistic", "loss scored along the geodesic"},
           {"classifier", "", "classifier CSV scoring the batches (binary data)"},
           {"embedding", "identity", "identity, pca or whiten"},
           {"z_dim", "0", "embedding dimension (0 keeps the data dimension)"},
           {"lambda2", "0.01", "ridge weight of the default classifier"},
           {"steps", "500", "gradient steps of the default classifier"},
           {"learning_rate", "0.1", "step size of the default classifier"}},
          run_augment};
}

}  // namespace geoaug::cli
