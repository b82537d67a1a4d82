#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "geoaug/classifier.hpp"
#include "geoaug/embedding.hpp"
#include "geoaug/entropic_ot.hpp"
#include "geoaug/linalg.hpp"
#include "geoaug/measures.hpp"

namespace geoaug {

/// Barycentric projection of an entropic plan: source row i maps to
/// sum_j pi_ij x1_j / sum_j pi_ij.
class BarycentricMap {
 public:
  BarycentricMap(TransportPlan plan, Matrix source, Matrix target);

  const TransportPlan& plan() const noexcept { return plan_; }
  const Matrix& source() const noexcept { return source_; }
  const Matrix& target() const noexcept { return target_; }
  /// Images of the source points, one row per source point.
  const Matrix& images() const noexcept { return images_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(source_.cols()); }

  /// Out-of-sample evaluation: the image of the nearest source point plus the offset
  /// from that point. Exact source points map to their images.
  Matrix evaluate(const Matrix& x) const;

 private:
  TransportPlan plan_;
  Matrix source_;
  Matrix target_;
  Matrix images_;
};

/// Solves Sinkhorn between the measures and wraps the plan. Throws ConvergenceFailure
/// when the plan does not converge.
BarycentricMap estimate_map(const DiscreteMeasure& source, const DiscreteMeasure& target,
                            const SinkhornOptions& options = {});

/// Interpolated samples with their labels. Labels are -1/+1: the classes themselves
/// for binary data, while in a multiclass batch -1 encodes `source_class` and +1
/// encodes `target_class`.
struct AugmentationBatch {
  Matrix samples;
  std::vector<double> soft_labels;  ///< (1 - t) y0 + t y1
  std::vector<int> hard_labels;     ///< y0 for t <= 0.5, y1 otherwise
  double t = 0.0;
  std::vector<std::size_t> source_indices;
  int source_class = -1;
  int target_class = 1;
  std::size_t pair_id = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(samples.rows()); }
  Vector soft_label_vector() const;
};

/// Hard label at geodesic time t: y0 when t <= 0.5, y1 otherwise.
int hard_label(int y0, int y1, double t);

/// (1 - t) X0 + t T(X0) for every source point; t = 0 and t = 1 return the source
/// points and their images exactly.
AugmentationBatch interpolate(const BarycentricMap& map, int label_source, int label_target,
                              double t);

/// Mixup: (1 - t) x0_i + t x1_{pairing[i]} with labels mixed the same way.
AugmentationBatch mixup_mode(const Matrix& source, const Matrix& target,
                             const std::vector<std::size_t>& pairing, int label_source,
                             int label_target, double t);

/// Mean loss of the classifier on the batch: soft labels for differentiable losses,
/// hard labels for zero_one.
double batch_loss(const LinearClassifier& clf, LossKind loss, const AugmentationBatch& batch);

struct WorstCaseResult {
  double t_star;
  std::vector<double> loss_curve;  ///< mean loss at each grid point
};

/// Grid search for the geodesic time with the largest mean loss; ties go to the
/// earliest grid entry.
WorstCaseResult worst_case_t(const BarycentricMap& map, int label_source, int label_target,
                             const LinearClassifier& clf, LossKind loss,
                             const std::vector<double>& t_grid);

/// n uniform points on [0, 1] including both ends (n >= 2), or {0} for n = 1.
std::vector<double> uniform_grid(std::size_t n);

/// Scores a candidate batch (decoded to data space, class pair set); larger is worse.
using BatchObjective = std::function<double(const AugmentationBatch&)>;

enum class TGridMode { grid, random };

struct AugmentConfig {
  std::size_t batch_size = 64;     ///< points drawn per class in each batch
  double magnification = 1.0;     ///< augmented samples = round(magnification * n)
  TGridMode t_mode = TGridMode::grid;
  std::size_t t_count = 21;        ///< grid size, or number of uniform draws
  SinkhornOptions sinkhorn;
  std::uint64_t seed = 0;
};

/// Minibatch worst-case geodesic augmentation. Each batch picks an unordered class
/// pair uniformly with a random orientation, draws batch_size points per class
/// (with replacement for classes smaller than that), maps them through the
/// embedding, fits the barycentric map there, keeps the t that maximizes
/// `objective` on the decoded samples and stores the decoded batch. The last batch
/// is truncated so the total equals round(magnification * n).
std::vector<AugmentationBatch> augment_batches(const LabeledDataset& data,
                                               const BatchObjective& objective,
                                               const AugmentConfig& config,
                                               const EmbeddingHook& embedding);
std::vector<AugmentationBatch> augment_batches(const LabeledDataset& data,
                                               const BatchObjective& objective,
                                               const AugmentConfig& config);

/// Objective that evaluates batch_loss for a fixed classifier.
BatchObjective classifier_objective(const LinearClassifier& clf, LossKind loss);

/// All batches stacked, with soft labels, for training.
SoftLabeledData stack_batches(const std::vector<AugmentationBatch>& batches, std::size_t dim);

/// CSV with columns f0..f{d-1}, soft_label, hard_label, t, pair_id. Multiclass batches
/// write the class index as hard_label.
void write_batches_csv(const std::vector<AugmentationBatch>& batches, std::size_t dim,
                       const std::filesystem::path& path,
                       const std::vector<std::string>& comments = {});

}  // namespace geoaug
