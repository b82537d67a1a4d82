#include "geoaug/geodesic_regularizer.hpp"

#include <cmath>

#include "geoaug/csv_writer.hpp"
#include "geoaug/error.hpp"

namespace geoaug {
namespace {

void check_grid(const std::vector<double>& grid, std::size_t min_size, const char* who) {
  if (grid.size() < min_size) {
    throw InvalidArgument(std::string(who) + ": t grid needs at least " + std::to_string(min_size) +
                          " point(s)");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] <= 1.0)) {
      throw InvalidArgument(std::string(who) + ": t values must lie in [0, 1]");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw InvalidArgument(std::string(who) + ": t grid must be strictly increasing");
    }
  }
}

void check_segment(const LinearClassifier& clf, const GeodesicSegment& seg) {
  if (seg.source.rows() < 1) throw InvalidArgument("geodesic: empty segment");
  if (seg.source.rows() != seg.images.rows() || seg.source.cols() != seg.images.cols()) {
    throw InvalidArgument("geodesic: source and image shapes differ");
  }
  if (seg.source.cols() != clf.theta.size()) throw InvalidArgument("geodesic: dimension mismatch");
}

Matrix point_at(const GeodesicSegment& seg, double t) {
  if (t == 0.0) return seg.source;
  if (t == 1.0) return seg.images;
  return (1.0 - t) * seg.source + t * seg.images;
}

struct Node {
  double loss;
  double slope;  // dR/dt (analytic for smooth losses)
  Vector d_theta;
  double d_beta;
};

Node evaluate_node(const LinearClassifier& clf, const GeodesicSegment& seg, LossKind loss,
                   double t, bool with_gradient) {
  const Matrix xt = point_at(seg, t);
  const Vector s = clf.scores(xt);
  const Vector proj = (seg.images - seg.source) * clf.theta;  // theta^T (T(x) - x)
  const double dy = static_cast<double>(seg.label_target - seg.label_source);
  const double soft = (1.0 - t) * seg.label_source + t * seg.label_target;
  const double label = loss == LossKind::zero_one ? hard_label(seg.label_source, seg.label_target, t)
                                                  : soft;
  const auto n = s.size();
  Node node{0.0, 0.0, Vector::Zero(clf.theta.size()), 0.0};
  Vector coef(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const LossValue l = evaluate_loss(loss, s(i), label);
    node.loss += l.value;
    node.slope += l.d_score * proj(i) + l.d_label * dy;
    coef(i) = l.d2_score * proj(i) + l.d2_score_label * dy;
    if (with_gradient) node.d_beta += coef(i);
  }
  const double inv = 1.0 / static_cast<double>(n);
  node.loss *= inv;
  node.slope *= inv;
  if (with_gradient) {
    Vector ds(n);
    for (Eigen::Index i = 0; i < n; ++i) ds(i) = evaluate_loss(loss, s(i), label).d_score;
    node.d_theta = inv * (xt.transpose() * coef + (seg.images - seg.source).transpose() * ds);
    node.d_beta *= inv;
  }
  return node;
}

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h = 0.5 * (grid[k + 1] - grid[k]);
    w[k] += h;
    w[k + 1] += h;
  }
  return w;
}

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

GeodesicSegment GeodesicSegment::from(const BarycentricMap& map, int label_source,
                                      int label_target) {
  if ((label_source != -1 && label_source != 1) || (label_target != -1 && label_target != 1)) {
    throw InvalidArgument("GeodesicSegment: labels must be -1 or +1");
  }
  return {map.source(), map.images(), label_source, label_target};
}

GeodesicLossCurve performance_geodesic(const LinearClassifier& clf, const GeodesicSegment& seg,
                                       LossKind loss, const std::vector<double>& t_grid) {
  check_grid(t_grid, 1, "performance_geodesic");
  check_segment(clf, seg);
  GeodesicLossCurve curve;
  curve.t = t_grid;
  for (const double t : t_grid) {
    const Node node = evaluate_node(clf, seg, loss, t, false);
    curve.loss.push_back(node.loss);
    curve.dloss_dt.push_back(node.slope);
  }
  if (loss == LossKind::zero_one) {
    const std::size_t m = t_grid.size();
    for (std::size_t k = 0; k < m; ++k) {
      if (m == 1) {
        curve.dloss_dt[k] = 0.0;
        continue;
      }
      const std::size_t lo = k == 0 ? 0 : k - 1;
      const std::size_t hi = k + 1 == m ? k : k + 1;
      curve.dloss_dt[k] = (curve.loss[hi] - curve.loss[lo]) / (t_grid[hi] - t_grid[lo]);
    }
  }
  return curve;
}

GeodesicLossCurve performance_geodesic(const LinearClassifier& clf, const BarycentricMap& map,
                                       int label_source, int label_target, LossKind loss,
                                       const std::vector<double>& t_grid) {
  return performance_geodesic(clf, GeodesicSegment::from(map, label_source, label_target), loss,
                              t_grid);
}

double smoothness_regularizer(const LinearClassifier& clf, const GeodesicSegment& seg,
                              LossKind loss, const std::vector<double>& t_grid) {
  if (loss == LossKind::zero_one) {
    throw InvalidArgument(
        "smoothness_regularizer: zero_one loss has no derivative; use the total variation form");
  }
  check_grid(t_grid, 2, "smoothness_regularizer");
  const GeodesicLossCurve curve = performance_geodesic(clf, seg, loss, t_grid);
  const auto w = trapezoid_weights(t_grid);
  double total = 0.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) total += w[k] * std::abs(curve.dloss_dt[k]);
  return total;
}

double smoothness_regularizer(const LinearClassifier& clf, const BarycentricMap& map,
                              int label_source, int label_target, LossKind loss,
                              const std::vector<double>& t_grid) {
  return smoothness_regularizer(clf, GeodesicSegment::from(map, label_source, label_target), loss,
                                t_grid);
}

double total_variation_regularizer(const LinearClassifier& clf, const GeodesicSegment& seg,
                                   LossKind loss, const std::vector<double>& t_grid) {
  check_grid(t_grid, 2, "total_variation_regularizer");
  const GeodesicLossCurve curve = performance_geodesic(clf, seg, loss, t_grid);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < curve.loss.size(); ++k) {
    total += std::abs(curve.loss[k + 1] - curve.loss[k]);
  }
  return total;
}

double smoothness_regularizer_embedded(const LinearClassifier& clf, const TransportPlan& plan,
                                       const Matrix& source, const Matrix& target,
                                       const EmbeddingHook& embedding, int label_source,
                                       int label_target, LossKind loss,
                                       const std::vector<double>& t_grid) {
  if (clf.dim() != embedding.output_dim()) {
    throw InvalidArgument("smoothness_regularizer_embedded: classifier must act on the embedding");
  }
  const BarycentricMap map(plan, embedding.forward(source), embedding.forward(target));
  return smoothness_regularizer(clf, map, label_source, label_target, loss, t_grid);
}

ProjectionPenalty::ProjectionPenalty(Vector mu, double scale) : mu_(std::move(mu)), scale_(scale) {
  if (mu_.size() < 1 || !mu_.allFinite()) throw InvalidArgument("ProjectionPenalty: bad direction");
  if (!(scale_ >= 0.0)) throw InvalidArgument("ProjectionPenalty: scale must be >= 0");
}

double ProjectionPenalty::value(const LinearClassifier& clf) const {
  return scale_ * std::abs(clf.theta.dot(mu_));
}

void ProjectionPenalty::gradient(const LinearClassifier& clf, Vector& d_theta,
                                 double& d_beta) const {
  d_theta = scale_ * sign0(clf.theta.dot(mu_)) * mu_;
  d_beta = 0.0;
}

GeodesicPenalty::GeodesicPenalty(std::vector<GeodesicSegment> segments, LossKind loss,
                                 std::vector<double> t_grid)
    : segments_(std::move(segments)), loss_(loss), t_grid_(std::move(t_grid)) {
  if (segments_.empty()) throw InvalidArgument("GeodesicPenalty: no segments");
  if (loss_ == LossKind::zero_one) throw InvalidArgument("GeodesicPenalty: loss must be differentiable");
  check_grid(t_grid_, 2, "GeodesicPenalty");
}

double GeodesicPenalty::value(const LinearClassifier& clf) const {
  double total = 0.0;
  for (const auto& seg : segments_) total += smoothness_regularizer(clf, seg, loss_, t_grid_);
  return total;
}

void GeodesicPenalty::gradient(const LinearClassifier& clf, Vector& d_theta, double& d_beta) const {
  d_theta = Vector::Zero(clf.theta.size());
  d_beta = 0.0;
  const auto w = trapezoid_weights(t_grid_);
  for (const auto& seg : segments_) {
    check_segment(clf, seg);
    for (std::size_t k = 0; k < t_grid_.size(); ++k) {
      const Node node = evaluate_node(clf, seg, loss_, t_grid_[k], true);
      const double c = w[k] * sign0(node.slope);
      d_theta += c * node.d_theta;
      d_beta += c * node.d_beta;
    }
  }
}

void write_curve_csv(const GeodesicLossCurve& curve, const std::filesystem::path& path,
                     const std::vector<std::string>& comments) {
  CsvWriter w;
  w.comments(comments);
  w.header({"t", "loss", "dloss_dt"});
  for (std::size_t k = 0; k < curve.t.size(); ++k) {
    w.field(curve.t[k]).field(curve.loss[k]).field(curve.dloss_dt[k]);
    w.end_row();
  }
  w.save(path);
}

}  // namespace geoaug
