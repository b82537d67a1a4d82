#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geoaug/linalg.hpp"
#include "geoaug/measures.hpp"

namespace geoaug {

/// Pairwise ground costs, source points by target points. Squared Euclidean is
/// the only built-in metric.
struct CostMatrix {
  Matrix values;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

CostMatrix cost_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b);
CostMatrix cost_matrix(const Matrix& x, const Matrix& y);

/// Median of all entries; falls back to the maximum, then to 1, when the median is zero.
double median_cost(const CostMatrix& cost);

struct SinkhornOptions {
  /// Entropic coefficient, in units of the normalized cost when normalize_cost is set.
  double epsilon = 0.01;
  std::size_t max_iter = 10000;
  /// L-infinity bound on the marginal violation that counts as converged.
  double tol = 1e-6;
  /// Divide costs by their median before solving; the plan is unaffected otherwise.
  bool normalize_cost = true;
  /// Overrides the median when set (used to share one scale across related solves).
  std::optional<double> cost_scale;
  /// Anneal epsilon geometrically from the cost scale down to `epsilon`.
  bool epsilon_scaling = true;
};

/// Entropic coupling with its marginals and solver diagnostics.
struct TransportPlan {
  Matrix coupling;
  Vector source_weights;
  Vector target_weights;
  double epsilon = 0.0;     ///< as requested
  double cost_scale = 1.0;  ///< absolute blur is epsilon * cost_scale
  std::size_t iterations = 0;
  double marginal_violation = 0.0;
  bool converged = false;
  /// Dual potentials in cost units: coupling_ij = exp((f_i + g_j - C_ij) / (epsilon * cost_scale)).
  Vector source_potential;
  Vector target_potential;

  double absolute_epsilon() const noexcept { return epsilon * cost_scale; }
};

/// Log-stabilized Sinkhorn. Non-convergence is reported through `converged`;
/// NaN/Inf in the potentials throws NumericalFailure.
TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const SinkhornOptions& options = {});
TransportPlan sinkhorn(const CostMatrix& cost, const Vector& source_weights,
                       const Vector& target_weights, const SinkhornOptions& options = {});

/// <coupling, cost>, the transport cost without the entropy term.
double entropic_cost(const TransportPlan& plan, const CostMatrix& cost);

/// Max |row sum - source weight|, |column sum - target weight|.
double marginal_violation(const Matrix& coupling, const Vector& source_weights,
                          const Vector& target_weights);

/// Transport cost of (a, b) minus the mean of the self costs of (a, a) and (b, b),
/// all solved with the cost scale of the cross problem.
struct DebiasedCost {
  double value;
  double cross;
  double self_source;
  double self_target;
  bool converged;
};
DebiasedCost debiased_transport_cost(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                     const SinkhornOptions& options = {});

/// Fixed-support debiased Sinkhorn barycenter of two measures.
///
/// Iterates the scalings (a_k, b_k) and the debiasing vector d of the debiased
/// barycenter scheme in the log domain:
///   a_k = alpha_k / (K_k b_k)
///   alpha = d * prod_k (K_k^T a_k)^{w_k}
///   b_k = alpha / (K_k^T a_k)
///   d = sqrt(d * alpha / (K_s d))
/// where K_k couples input k with the support and K_s couples the support with
/// itself. Returns a simplex vector over the support rows.
struct BarycenterResult {
  Vector weights;
  std::size_t iterations = 0;
  double change = 0.0;  ///< last L-infinity change of the barycenter weights
  bool converged = false;
};
BarycenterResult debiased_barycenter(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                     double weight_a, double weight_b, const Matrix& support,
                                     const SinkhornOptions& options = {});

/// CSV dump of (i, j, mass) for coupling entries above 1e-12.
void write_plan_csv(const TransportPlan& plan, const std::filesystem::path& path,
                    const std::vector<std::string>& comments = {});

}  // namespace geoaug
