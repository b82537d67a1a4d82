#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geoaug/classifier.hpp"
#include "geoaug/embedding.hpp"
#include "geoaug/geodesic_augment.hpp"

namespace geoaug {

/// Mean loss R(t) along the interpolation and its derivative at each node.
struct GeodesicLossCurve {
  std::vector<double> t;
  std::vector<double> loss;
  std::vector<double> dloss_dt;
};

/// Source points, their images and the endpoint labels of one geodesic.
struct GeodesicSegment {
  Matrix source;
  Matrix images;
  int label_source;
  int label_target;

  static GeodesicSegment from(const BarycentricMap& map, int label_source, int label_target);
};

/// R(t_i) is the mean loss on interpolate(map, t_i) against soft labels (hard labels
/// for zero_one). dR/dt is exact for differentiable losses:
///   mean_i [ dl/ds * grad f(x_t) . (T(x_i) - x_i) + dl/dy * (y1 - y0) ].
/// For zero_one it is a finite difference of R over the grid.
GeodesicLossCurve performance_geodesic(const LinearClassifier& clf, const BarycentricMap& map,
                                       int label_source, int label_target, LossKind loss,
                                       const std::vector<double>& t_grid);
GeodesicLossCurve performance_geodesic(const LinearClassifier& clf, const GeodesicSegment& seg,
                                       LossKind loss, const std::vector<double>& t_grid);

/// Trapezoidal integral of |dR/dt| over the grid. Needs a differentiable loss and a
/// strictly increasing grid of at least two points in [0, 1].
double smoothness_regularizer(const LinearClassifier& clf, const BarycentricMap& map,
                              int label_source, int label_target, LossKind loss,
                              const std::vector<double>& t_grid);
double smoothness_regularizer(const LinearClassifier& clf, const GeodesicSegment& seg,
                              LossKind loss, const std::vector<double>& t_grid);

/// Total variation sum |R(t_{k+1}) - R(t_k)|; defined for every loss including zero_one.
double total_variation_regularizer(const LinearClassifier& clf, const GeodesicSegment& seg,
                                   LossKind loss, const std::vector<double>& t_grid);

/// The regularizer computed in embedding space: source and target points pass
/// through `embedding`, the plan's barycentric projection is taken there and
/// `clf` acts on embedded points.
double smoothness_regularizer_embedded(const LinearClassifier& clf, const TransportPlan& plan,
                                       const Matrix& source, const Matrix& target,
                                       const EmbeddingHook& embedding, int label_source,
                                       int label_target, LossKind loss,
                                       const std::vector<double>& t_grid);

/// |theta^T mu| scaled by `scale`: the regularizer of a linear model with the
/// linear_yfx loss on the symmetric Gaussian pair is 2 |theta^T mu|.
class ProjectionPenalty : public Penalty {
 public:
  ProjectionPenalty(Vector mu, double scale = 1.0);
  double value(const LinearClassifier& clf) const override;
  void gradient(const LinearClassifier& clf, Vector& d_theta, double& d_beta) const override;

 private:
  Vector mu_;
  double scale_;
};

/// smoothness_regularizer on fixed geodesic segments (summed), with its exact
/// gradient in (theta, beta).
class GeodesicPenalty : public Penalty {
 public:
  GeodesicPenalty(std::vector<GeodesicSegment> segments, LossKind loss, std::vector<double> t_grid);
  double value(const LinearClassifier& clf) const override;
  void gradient(const LinearClassifier& clf, Vector& d_theta, double& d_beta) const override;

 private:
  std::vector<GeodesicSegment> segments_;
  LossKind loss_;
  std::vector<double> t_grid_;
};

/// CSV with columns t, loss, dloss_dt.
void write_curve_csv(const GeodesicLossCurve& curve, const std::filesystem::path& path,
                     const std::vector<std::string>& comments = {});

}  // namespace geoaug
