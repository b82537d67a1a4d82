#include "geoaug/geodesic_augment.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "geoaug/csv_writer.hpp"
#include "geoaug/error.hpp"
#include "geoaug/rng.hpp"

namespace geoaug {
namespace {

void check_label(int y, const char* who) {
  if (y != -1 && y != 1) throw InvalidArgument(std::string(who) + ": labels must be -1 or +1");
}

void check_t(double t, const char* who) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument(std::string(who) + ": t must lie in [0, 1]");
}

AugmentationBatch labeled_batch(Matrix samples, int y0, int y1, double t) {
  AugmentationBatch b;
  const auto n = static_cast<std::size_t>(samples.rows());
  b.samples = std::move(samples);
  b.t = t;
  b.soft_labels.assign(n, (1.0 - t) * y0 + t * y1);
  b.hard_labels.assign(n, hard_label(y0, y1, t));
  b.source_class = y0;
  b.target_class = y1;
  return b;
}

// Without replacement when the class is large enough, with replacement otherwise.
std::vector<std::size_t> draw_rows(const std::vector<std::size_t>& rows, std::size_t count,
                                   Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(count);
  if (rows.size() >= count) {
    std::vector<std::size_t> pool = rows;
    for (std::size_t k = 0; k < count; ++k) {
      const auto j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
      std::swap(pool[k], pool[j]);
      out.push_back(pool[k]);
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) out.push_back(rows[rng.below(rows.size())]);
  }
  return out;
}

Matrix gather(const Matrix& x, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

}  // namespace

BarycentricMap::BarycentricMap(TransportPlan plan, Matrix source, Matrix target)
    : plan_(std::move(plan)), source_(std::move(source)), target_(std::move(target)) {
  const Matrix& pi = plan_.coupling;
  if (pi.rows() != source_.rows() || pi.cols() != target_.rows()) {
    throw InvalidArgument("BarycentricMap: plan shape does not match the point clouds");
  }
  if (source_.cols() != target_.cols()) throw InvalidArgument("BarycentricMap: dimension mismatch");
  images_.resize(source_.rows(), source_.cols());
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    const double mass = pi.row(i).sum();
    if (!(mass > 0.0)) {
      throw NumericalFailure("BarycentricMap: source point " + std::to_string(i) +
                             " carries no mass");
    }
    images_.row(i) = (pi.row(i) / mass) * target_;
  }
}

Matrix BarycentricMap::evaluate(const Matrix& x) const {
  if (x.cols() != source_.cols()) throw InvalidArgument("BarycentricMap::evaluate: dimension mismatch");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index nearest = 0;
    (source_.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&nearest);
    out.row(i) = images_.row(nearest) + (x.row(i) - source_.row(nearest));
  }
  return out;
}

BarycentricMap estimate_map(const DiscreteMeasure& source, const DiscreteMeasure& target,
                            const SinkhornOptions& options) {
  TransportPlan plan = sinkhorn(source, target, options);
  if (!plan.converged) {
    throw ConvergenceFailure("estimate_map: Sinkhorn did not converge (violation " +
                                 format_double(plan.marginal_violation) + " after " +
                                 std::to_string(plan.iterations) + " iterations)",
                             plan.iterations, plan.marginal_violation);
  }
  return BarycentricMap(std::move(plan), source.points(), target.points());
}

Vector AugmentationBatch::soft_label_vector() const {
  return Eigen::Map<const Vector>(soft_labels.data(), static_cast<Eigen::Index>(soft_labels.size()));
}

int hard_label(int y0, int y1, double t) { return t <= 0.5 ? y0 : y1; }

AugmentationBatch interpolate(const BarycentricMap& map, int label_source, int label_target,
                              double t) {
  check_t(t, "interpolate");
  check_label(label_source, "interpolate");
  check_label(label_target, "interpolate");
  Matrix samples;
  if (t == 0.0) {
    samples = map.source();
  } else if (t == 1.0) {
    samples = map.images();
  } else {
    samples = (1.0 - t) * map.source() + t * map.images();
  }
  AugmentationBatch b = labeled_batch(std::move(samples), label_source, label_target, t);
  b.source_indices.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) b.source_indices[i] = i;
  return b;
}

AugmentationBatch mixup_mode(const Matrix& source, const Matrix& target,
                             const std::vector<std::size_t>& pairing, int label_source,
                             int label_target, double t) {
  check_t(t, "mixup_mode");
  check_label(label_source, "mixup_mode");
  check_label(label_target, "mixup_mode");
  if (source.rows() != target.rows()) {
    throw InvalidArgument("mixup_mode: source and target counts differ (" +
                          std::to_string(source.rows()) + " vs " + std::to_string(target.rows()) +
                          ")");
  }
  if (source.cols() != target.cols()) throw InvalidArgument("mixup_mode: dimension mismatch");
  const auto n = static_cast<std::size_t>(source.rows());
  if (pairing.size() != n) throw InvalidArgument("mixup_mode: pairing size differs from row count");
  std::vector<bool> used(n, false);
  for (const auto j : pairing) {
    if (j >= n || used[j]) throw InvalidArgument("mixup_mode: pairing is not a bijection");
    used[j] = true;
  }
  Matrix paired(source.rows(), source.cols());
  for (std::size_t i = 0; i < n; ++i) {
    paired.row(static_cast<Eigen::Index>(i)) = target.row(static_cast<Eigen::Index>(pairing[i]));
  }
  Matrix samples;
  if (t == 0.0) {
    samples = source;
  } else if (t == 1.0) {
    samples = paired;
  } else {
    samples = (1.0 - t) * source + t * paired;
  }
  AugmentationBatch b = labeled_batch(std::move(samples), label_source, label_target, t);
  b.source_indices.resize(n);
  for (std::size_t i = 0; i < n; ++i) b.source_indices[i] = i;
  return b;
}

double batch_loss(const LinearClassifier& clf, LossKind loss, const AugmentationBatch& batch) {
  if (batch.size() == 0) throw InvalidArgument("batch_loss: empty batch");
  const Vector s = clf.scores(batch.samples);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double y = loss == LossKind::zero_one ? batch.hard_labels[i] : batch.soft_labels[i];
    total += evaluate_loss(loss, s(static_cast<Eigen::Index>(i)), y).value;
  }
  return total / static_cast<double>(batch.size());
}

WorstCaseResult worst_case_t(const BarycentricMap& map, int label_source, int label_target,
                             const LinearClassifier& clf, LossKind loss,
                             const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidArgument("worst_case_t: empty t grid");
  WorstCaseResult out{t_grid.front(), {}};
  out.loss_curve.reserve(t_grid.size());
  double best = -std::numeric_limits<double>::infinity();
  for (const double t : t_grid) {
    const double l = batch_loss(clf, loss, interpolate(map, label_source, label_target, t));
    out.loss_curve.push_back(l);
    if (l > best) {
      best = l;
      out.t_star = t;
    }
  }
  return out;
}

std::vector<double> uniform_grid(std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform_grid: need at least one point");
  if (n == 1) return {0.0};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

std::vector<AugmentationBatch> augment_batches(const LabeledDataset& data,
                                               const BatchObjective& objective,
                                               const AugmentConfig& config,
                                               const EmbeddingHook& embedding) {
  if (data.empty()) throw InvalidArgument("augment_batches: empty dataset");
  const auto by_class = data.class_rows();
  if (by_class.size() < 2) {
    throw InvalidArgument("augment_batches: need at least two classes, found " +
                          std::to_string(by_class.size()));
  }
  if (config.batch_size < 2) throw InvalidArgument("augment_batches: batch_size must be >= 2");
  if (!(config.magnification >= 0.0) || !std::isfinite(config.magnification)) {
    throw InvalidArgument("augment_batches: magnification must be finite and >= 0");
  }
  if (config.t_count < 1) throw InvalidArgument("augment_batches: t_count must be >= 1");
  if (embedding.input_dim() != data.dim()) {
    throw InvalidArgument("augment_batches: embedding input dimension != data dimension");
  }
  if (!objective) throw InvalidArgument("augment_batches: missing objective");

  const auto total = static_cast<std::size_t>(
      std::llround(config.magnification * static_cast<double>(data.size())));
  std::vector<AugmentationBatch> out;
  if (total == 0) return out;

  std::vector<std::pair<int, int>> pairs;
  for (auto a = by_class.begin(); a != by_class.end(); ++a) {
    for (auto b = std::next(a); b != by_class.end(); ++b) pairs.emplace_back(a->first, b->first);
  }
  const bool binary = data.mode() == LabelMode::binary;
  const std::vector<double> grid =
      config.t_mode == TGridMode::grid ? uniform_grid(config.t_count) : std::vector<double>{};

  const Rng base(config.seed);
  std::size_t produced = 0;
  for (std::size_t k = 0; produced < total; ++k) {
    Rng rng = base.split(k + 1);
    auto [c0, c1] = pairs[rng.below(pairs.size())];
    if (rng.sign() < 0) std::swap(c0, c1);
    const auto rows0 = draw_rows(by_class.at(c0), config.batch_size, rng);
    const auto rows1 = draw_rows(by_class.at(c1), config.batch_size, rng);
    const Matrix x0 = gather(data.features(), rows0);
    const Matrix x1 = gather(data.features(), rows1);
    const BarycentricMap map =
        estimate_map(DiscreteMeasure::uniform(embedding.forward(x0)),
                     DiscreteMeasure::uniform(embedding.forward(x1)), config.sinkhorn);
    const int y0 = binary ? c0 : -1;
    const int y1 = binary ? c1 : 1;

    std::vector<double> ts = grid;
    if (config.t_mode == TGridMode::random) {
      ts.resize(config.t_count);
      for (auto& t : ts) t = rng.uniform();
    }
    AugmentationBatch best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const double t : ts) {
      AugmentationBatch cand = interpolate(map, y0, y1, t);
      if (!embedding.is_identity()) cand.samples = embedding.inverse(cand.samples);
      cand.source_class = c0;
      cand.target_class = c1;
      cand.pair_id = k;
      const double score = objective(cand);
      if (score > best_score) {
        best_score = score;
        best = std::move(cand);
      }
    }
    if (best.size() == 0) {
      throw NumericalFailure("augment_batches: objective returned no finite score");
    }
    best.source_indices = rows0;
    const std::size_t keep = std::min(best.size(), total - produced);
    if (keep < best.size()) {
      best.samples.conservativeResize(static_cast<Eigen::Index>(keep), Eigen::NoChange);
      best.soft_labels.resize(keep);
      best.hard_labels.resize(keep);
      best.source_indices.resize(keep);
    }
    produced += keep;
    out.push_back(std::move(best));
  }
  return out;
}

std::vector<AugmentationBatch> augment_batches(const LabeledDataset& data,
                                               const BatchObjective& objective,
                                               const AugmentConfig& config) {
  return augment_batches(data, objective, config, EmbeddingHook::identity(data.dim()));
}

BatchObjective classifier_objective(const LinearClassifier& clf, LossKind loss) {
  return [clf, loss](const AugmentationBatch& b) { return batch_loss(clf, loss, b); };
}

SoftLabeledData stack_batches(const std::vector<AugmentationBatch>& batches, std::size_t dim) {
  std::size_t n = 0;
  for (const auto& b : batches) {
    if (b.size() > 0 && static_cast<std::size_t>(b.samples.cols()) != dim) {
      throw InvalidArgument("stack_batches: dimension mismatch");
    }
    n += b.size();
  }
  SoftLabeledData out{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim)),
                      Vector(static_cast<Eigen::Index>(n))};
  Eigen::Index row = 0;
  for (const auto& b : batches) {
    const auto m = static_cast<Eigen::Index>(b.size());
    if (m == 0) continue;
    out.features.middleRows(row, m) = b.samples;
    out.labels.segment(row, m) = b.soft_label_vector();
    row += m;
  }
  return out;
}

void write_batches_csv(const std::vector<AugmentationBatch>& batches, std::size_t dim,
                       const std::filesystem::path& path,
                       const std::vector<std::string>& comments) {
  CsvWriter w;
  w.comments(comments);
  std::vector<std::string> header;
  for (std::size_t j = 0; j < dim; ++j) header.push_back("f" + std::to_string(j));
  for (const char* c : {"soft_label", "hard_label", "t", "pair_id"}) header.emplace_back(c);
  w.header(header);
  for (const auto& b : batches) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (Eigen::Index j = 0; j < b.samples.cols(); ++j) w.field(b.samples(r, j));
      const int cls = hard_label(b.source_class, b.target_class, b.t);
      w.field(b.soft_labels[i]).field(cls).field(b.t).field(b.pair_id);
      w.end_row();
    }
  }
  w.save(path);
}

}  // namespace geoaug
