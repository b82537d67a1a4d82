#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "common.hpp"
#include "geoaug/cli/commands.hpp"
#include "geoaug/csv_writer.hpp"
#include "geoaug/gaussian_ot.hpp"
#include "geoaug/geodesic_augment.hpp"
#include "geoaug/geodesic_regularizer.hpp"
#include "geoaug/rng.hpp"
#include "geoaug/robustness.hpp"

namespace geoaug::cli {
namespace {

struct DroRow {
  double eps;
  DroResult result;
  bool pass;
};

DroRow dro_row(const ConditionalGaussianModel& model, double eps, const DroGrid& grid) {
  const DroResult r = dro_worst_case_check(model, eps, grid);
  const bool s_ok = std::abs(r.s - r.expected_s) <= r.step_s + 1e-12;
  const bool v_ok = std::abs(r.v - 1.0) <= r.step_v + 1e-12;
  const bool err_ok = std::abs(r.error - r.expected_error) <= 1e-10;
  return {eps, r, s_ok && v_ok && err_ok};
}

void run_dro_check(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const auto model = model_from(c);
  DroGrid grid;
  grid.s_points = grid.v_points = c.get_count("grid_points");
  if (grid.s_points < 1) throw UsageError("config key 'grid_points': must be >= 1");
  grid.geodesic_only = c.get_bool("geodesic_only");
  const auto eps_grid = c.get_doubles("eps_grid");
  for (const double e : eps_grid) {
    if (e < 0.0) throw UsageError("config key 'eps_grid': values must be >= 0");
  }

  CsvWriter csv;
  csv.comments(c.echo());
  csv.header({"eps", "s", "v", "error", "expected_s", "expected_error", "step_s", "step_v",
              "feasible", "pass"});
  std::size_t failed = 0;
  for (const double e : eps_grid) {
    const DroRow row = dro_row(model, e, grid);
    const DroResult& r = row.result;
    csv.field(e).field(r.s).field(r.v).field(r.error).field(r.expected_s).field(r.expected_error);
    csv.field(r.step_s).field(r.step_v).field(r.feasible).field(row.pass ? 1 : 0);
    csv.end_row();
    log << "eps=" << short_number(e) << " worst (s, v) = (" << short_number(r.s) << ", "
        << short_number(r.v) << ") error " << short_number(r.error) << " expected "
        << short_number(r.expected_error) << (row.pass ? "  ok" : "  FAIL") << "\n";
    if (!row.pass) ++failed;
  }
  csv.save(out / "dro_check.csv");
  if (failed > 0) {
    throw CheckFailure(std::to_string(failed) + " of " + std::to_string(eps_grid.size()) +
                       " radii moved the worst case off the geodesic");
  }
}

struct Check {
  std::string name;
  double value;
  double reference;
  double tolerance;
  bool relative = false;

  double deviation() const {
    const double diff = std::abs(value - reference);
    return relative ? diff / std::abs(reference) : diff;
  }
  bool pass() const { return deviation() <= tolerance; }
};

Matrix uniform_points(std::size_t n, std::size_t d, Rng rng) {
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
  }
  return x;
}

// Uniform measures of equal size: some permutation attains the optimum.
double permutation_ot(const CostMatrix& cost) {
  std::vector<std::size_t> perm(cost.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      total += cost.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(perm.size());
}

void run_oracle_suite(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const Rng base(c.get_u64("seed"));
  const std::size_t n = c.get_count("n");
  if (n < 2) throw UsageError("config key 'n': must be >= 2");
  const std::size_t d = c.get_count("d");
  if (d < 1) throw UsageError("config key 'd': must be >= 1");
  const SinkhornOptions sk = sinkhorn_from(c);
  std::vector<Check> checks;

  {
    Vector m1 = Vector::Zero(static_cast<Eigen::Index>(d));
    m1(0) = 2.0;
    const GaussianParams p0(Vector::Zero(static_cast<Eigen::Index>(d)), SpdMatrix::isotropic(d, 1.0));
    const GaussianParams p1(m1, SpdMatrix::isotropic(d, 2.25));
    const auto a = DiscreteMeasure::uniform(sample_gaussian(p0, n, base.split(1).key()));
    const auto b = DiscreteMeasure::uniform(sample_gaussian(p1, n, base.split(2).key()));
    SinkhornOptions fine = sk;
    fine.epsilon = c.get_positive("w2_sinkhorn_eps");
    const auto cost = debiased_transport_cost(a, b, fine);
    checks.push_back({"w2_gaussian_vs_sinkhorn", cost.value, w2_gaussian_squared(p0, p1), 0.1, true});
  }
  {
    const auto model = ConditionalGaussianModel::axis_aligned(d, 1.0, 1.0);
    const auto pn = model.class_conditional(-1);
    const auto pp = model.class_conditional(1);
    const Matrix x0 = sample_gaussian(pn, n, base.split(3).key());
    const Matrix x1 = sample_gaussian(pp, n, base.split(4).key());
    const BarycentricMap map =
        estimate_map(DiscreteMeasure::uniform(x0), DiscreteMeasure::uniform(x1), sk);
    const Matrix exact = gaussian_monge_map(pn, pp).evaluate_rows(x0);
    const double rmse =
        std::sqrt((map.images() - exact).squaredNorm() / static_cast<double>(x0.rows()));
    checks.push_back({"monge_vs_barycentric_rmse", rmse, 0.0, 0.15 * std::sqrt(static_cast<double>(d))});
  }
  {
    const auto model = ConditionalGaussianModel::axis_aligned(d, 1.0, 1.0);
    Rng rng = base.split(5);
    Vector theta(static_cast<Eigen::Index>(d));
    for (auto& v : theta) v = rng.normal();
    const Matrix x0 = sample_gaussian(model.class_conditional(-1), c.get_count("reg_samples"),
                                      base.split(6).key());
    Matrix images = x0;
    images.rowwise() += 2.0 * model.mu().transpose();
    const GeodesicSegment seg{x0, images, -1, 1};
    const double reg = smoothness_regularizer(LinearClassifier(theta), seg, LossKind::linear_yfx,
                                              uniform_grid(64));
    checks.push_back({"regularizer_vs_closed_form", reg, 2.0 * std::abs(theta.dot(model.mu())), 0.03,
                      true});
  }
  {
    const auto model = ConditionalGaussianModel::axis_aligned(10, 1.0, 1.0);
    DroGrid grid;
    grid.geodesic_only = true;
    for (const double e : {0.1, 0.3}) {
      const DroResult r = dro_worst_case_check(model, e, grid);
      checks.push_back({"dro_geodesic_shift_eps_" + short_number(e), r.s, r.expected_s,
                        r.step_s + 1e-12});
      checks.push_back({"dro_geodesic_error_eps_" + short_number(e), r.error, r.expected_error,
                        1e-10});
    }
  }
  {
    const std::size_t m = 5;
    const Matrix x = uniform_points(m, 2, base.split(7));
    const Matrix y = uniform_points(m, 2, base.split(8));
    const auto a = DiscreteMeasure::uniform(x);
    const auto b = DiscreteMeasure::uniform(y);
    SinkhornOptions sharp;
    sharp.epsilon = 1e-3;
    const CostMatrix cost = cost_matrix(a, b);
    const TransportPlan plan = sinkhorn(a, b, sharp);
    checks.push_back({"entropic_vs_permutation_lp", entropic_cost(plan, cost), permutation_ot(cost),
                      1e-2});
  }
  {
    const Vector m0 = Vector::Zero(static_cast<Eigen::Index>(d));
    Vector m1 = m0;
    m1(0) = 3.0;
    const GaussianParams p0(m0, SpdMatrix::isotropic(d, 1.0));
    const GaussianParams p1(m1, SpdMatrix::isotropic(d, 4.0));
    const double total = w2_gaussian(p0, p1);
    const auto g1 = gaussian_geodesic(p0, p1, 0.2).params;
    const auto g2 = gaussian_geodesic(p0, p1, 0.7).params;
    checks.push_back({"geodesic_constant_speed", w2_gaussian(g1, g2), 0.5 * total, 1e-8});
  }
  {
    const auto model = ConditionalGaussianModel::axis_aligned(d, 1.0, 1.0);
    Rng rng = base.split(9);
    Vector theta(static_cast<Eigen::Index>(d));
    for (auto& v : theta) v = rng.normal();
    theta(0) = std::abs(theta(0)) + 1.0;
    const LinearClassifier clf(theta);
    const std::size_t mc = c.get_count("mc_samples");
    const double eps = 0.1;
    const double sigma_s = 0.5;
    const auto exact = analytic_report(model, clf, eps, sigma_s);
    const auto fgsm = monte_carlo_error(model, clf, mc, Attack::fgsm(eps), base.split(10).key());
    const auto noisy =
        monte_carlo_error(model, clf, mc, Attack::gaussian(sigma_s), base.split(11).key());
    auto se = [mc](double p) { return std::sqrt(p * (1.0 - p) / static_cast<double>(mc)); };
    checks.push_back({"standard_error_mc", fgsm.standard.value, exact.standard.value,
                      3.0 * se(exact.standard.value)});
    checks.push_back({"linf_error_mc", fgsm.robust->value, exact.robust->value,
                      3.0 * se(exact.robust->value)});
    checks.push_back({"smoothed_error_mc", noisy.smoothed->value, exact.smoothed->value,
                      3.0 * se(exact.smoothed->value)});
  }

  CsvWriter csv;
  csv.comments(c.echo());
  csv.header({"check", "value", "reference", "deviation", "tolerance", "pass"});
  std::size_t failed = 0;
  for (const auto& ch : checks) {
    csv.field(ch.name).field(ch.value).field(ch.reference).field(ch.deviation());
    csv.field(ch.tolerance).field(ch.pass() ? 1 : 0);
    csv.end_row();
    log << (ch.pass() ? "ok    " : "FAIL  ") << ch.name << "  deviation "
        << short_number(ch.deviation()) << " (tolerance " << short_number(ch.tolerance) << ")\n";
    if (!ch.pass()) ++failed;
  }
  csv.save(out / "oracle_suite.csv");
  if (failed > 0) {
    throw CheckFailure(std::to_string(failed) + " of " + std::to_string(checks.size()) +
                       " oracle checks failed");
  }
}

}  // namespace

Command dro_check_command() {
  return {"dro-check",
          "Worst-case Gaussian pair in the W2 ball around the class conditionals",
          join(model_keys(),
               {{"eps_grid", "0.1,0.3", "ball radii (comma separated)"},
                {"grid_points", "201", "grid points per axis"},
                {"geodesic_only", "false", "restrict the search to unit variance scale"}}),
          run_dro_check};
}

Command oracle_suite_command() {
  return {"oracle-suite",
          "Closed-form versus empirical checks with pass/fail and deviations",
          {{"d", "2", "dimension of the sampled checks"},
           {"n", "2000", "samples per side for the transport checks"},
           {"sinkhorn_eps", "0.01", "entropic coefficient for the map check"},
           {"sinkhorn_max_iter", "10000", "Sinkhorn iteration cap"},
           {"w2_sinkhorn_eps", "0.001", "entropic coefficient for the W2 check"},
           {"reg_samples", "10000", "source samples for the regularizer check"},
           {"mc_samples", "100000", "Monte Carlo samples for the error checks"}},
          run_oracle_suite};
}

}  // namespace geoaug::cli
