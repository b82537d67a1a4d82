// One PASS/FAIL line per acceptance criterion. `--criterion N` runs a single one;
// without it all ten run. The exit status is nonzero when any selected criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frozen.hpp"
#include "geoaug/classifier.hpp"
#include "geoaug/entropic_ot.hpp"
#include "geoaug/gaussian_ot.hpp"
#include "geoaug/geodesic_augment.hpp"
#include "geoaug/geodesic_regularizer.hpp"
#include "geoaug/rng.hpp"
#include "geoaug/robustness.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace geoaug;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

Vector normal_vector(std::size_t d, Rng& rng) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v;
}

Matrix random_spd(std::size_t d, Rng& rng) {
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  return a * a.transpose() / static_cast<double>(d) + 0.3 * Matrix::Identity(d, d);
}

Outcome gaussian_w2_oracle() {
  Stopwatch clock;
  Rng rng(2024);
  double worst = 0.0;
  int pairs = 0;
  SinkhornOptions o;
  o.epsilon = 0.001;
  for (std::size_t d : {2u, 10u}) {
    for (int k = 0; k < 10; ++k, ++pairs) {
      const double s0 = 0.5 + rng.uniform(), s1 = 0.5 + rng.uniform();
      const Vector m0 = normal_vector(d, rng);
      const double rho = 3.5 + rng.uniform();
      const Vector m1 = m0 + rho * std::sqrt(static_cast<double>(d)) * normal_vector(d, rng).normalized();
      const GaussianParams p0(m0, SpdMatrix::isotropic(d, s0 * s0));
      const GaussianParams p1(m1, SpdMatrix::isotropic(d, s1 * s1));
      const Rng stream = rng.split(static_cast<std::uint64_t>(pairs));
      const auto a = DiscreteMeasure::uniform(sample_gaussian(p0, 2000, stream.split(1).key()));
      const auto b = DiscreteMeasure::uniform(sample_gaussian(p1, 2000, stream.split(2).key()));
      const auto cost = debiased_transport_cost(a, b, o);
      const double exact = w2_gaussian_squared(p0, p1);
      worst = std::max(worst, std::abs(cost.value - exact) / exact);
    }
  }
  const double t = clock.seconds();
  return {worst <= 0.10 && t <= 60.0,
          std::to_string(pairs) + " pairs, max relative error " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome map_oracle() {
  Stopwatch clock;
  double worst_ratio = 0.0;
  std::string detail;
  for (std::size_t d : {2u, 10u}) {
    const auto model = ConditionalGaussianModel::axis_aligned(d, 1.0, 1.0);
    const Matrix x0 = sample_gaussian(model.class_conditional(-1), 2000, 11 + d);
    const Matrix x1 = sample_gaussian(model.class_conditional(1), 2000, 12 + d);
    const auto map = estimate_map(DiscreteMeasure::uniform(x0), DiscreteMeasure::uniform(x1));
    const auto exact = gaussian_monge_map(model.class_conditional(-1), model.class_conditional(1));
    const double rmse = std::sqrt((map.images() - exact.evaluate_rows(x0)).rowwise().squaredNorm().mean());
    const double bound = 0.15 * std::sqrt(static_cast<double>(d));
    worst_ratio = std::max(worst_ratio, rmse / bound);
    detail += "d=" + std::to_string(d) + " rmse " + fmt(rmse) + " (bound " + fmt(bound) + "), ";
  }
  const double t = clock.seconds();
  return {worst_ratio <= 1.0 && t <= 30.0, detail + fmt(t) + " s"};
}

Outcome displacement() {
  const auto model = ConditionalGaussianModel::axis_aligned(2, 1.0, 1.0);
  const std::size_t n = 2000;
  const Matrix x0 = sample_gaussian(model.class_conditional(-1), n, 31);
  const Matrix x1 = sample_gaussian(model.class_conditional(1), n, 32);
  const auto map = estimate_map(DiscreteMeasure::uniform(x0), DiscreteMeasure::uniform(x1));
  double worst_z = 0.0;
  for (double t : uniform_grid(21)) {
    const Matrix s = interpolate(map, -1, 1, t).samples;
    const Vector mean = s.colwise().mean().transpose();
    const Vector expected = (1.0 - t) * -model.mu() + t * model.mu();
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      const double sd = std::sqrt((s.col(j).array() - mean(j)).square().sum() / static_cast<double>(n - 1));
      worst_z = std::max(worst_z, std::abs(mean(j) - expected(j)) / (sd / std::sqrt(double(n))));
    }
  }

  Rng rng(33);
  double worst_speed = 0.0;
  for (int k = 0; k < 10; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(k % 4);
    const GaussianParams p0(normal_vector(d, rng), k % 2 ? SpdMatrix::full(random_spd(d, rng))
                                                         : SpdMatrix::isotropic(d, 0.5 + rng.uniform()));
    const GaussianParams p1(normal_vector(d, rng), k % 2 ? SpdMatrix::full(random_spd(d, rng))
                                                         : SpdMatrix::isotropic(d, 0.5 + rng.uniform()));
    const double total = w2_gaussian(p0, p1);
    for (int i = 0; i < 5; ++i) {
      const double s = rng.uniform(), t = rng.uniform();
      const double w = w2_gaussian(gaussian_geodesic(p0, p1, s).params, gaussian_geodesic(p0, p1, t).params);
      worst_speed = std::max(worst_speed, std::abs(w - std::abs(t - s) * total));
    }
  }
  return {worst_z <= 3.0 && worst_speed <= 1e-8,
          "max |mean deviation| " + fmt(worst_z) + " SE over 21 t, constant-speed deviation " +
              fmt(worst_speed)};
}

Outcome theorem1() {
  Stopwatch clock;
  const auto model = ConditionalGaussianModel::axis_aligned(10, 1.0, 1.0);
  const int trials = 1000;
  double freq[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      int improved = 0;
      for (int k = 0; k < trials; ++k) {
        improved += theorem1_trial(model, 20, static_cast<std::size_t>(frozen::kTheorem1N1[j]),
                                   frozen::kTheorem1R[i], 0.1, Rng(0).split(static_cast<std::uint64_t>(k)).key())
                        .improved;
      }
      freq[i][j] = static_cast<double>(improved) / trials;
    }
  }
  bool monotone = true;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j + 1 < 3; ++j) monotone &= freq[i][j + 1] >= freq[i][j] && freq[j + 1][i] >= freq[j][i];
  const double cell = freq[2][1];
  const double t = clock.seconds();
  std::string table;
  for (int i = 0; i < 3; ++i) {
    table += " r=" + fmt(frozen::kTheorem1R[i]) + ":";
    for (int j = 0; j < 3; ++j) table += " " + fmt(freq[i][j]);
  }
  return {cell >= frozen::kTheorem1MinFrequency && monotone && t <= 120.0,
          "frequency at r=0.9, n1=200 is " + fmt(cell) + " (threshold " + fmt(frozen::kTheorem1MinFrequency) +
              "), monotone " + (monotone ? "yes" : "no") + ", n1 = 50/200/800 by row:" + table + ", " +
              fmt(t) + " s"};
}

Outcome proposition1() {
  const auto model = ConditionalGaussianModel::axis_aligned(10, 1.0, 1.0);
  bool pass = true;
  std::string detail;
  for (double eps : {0.1, 0.3}) {
    const auto r = dro_worst_case_check(model, eps);
    const bool ok = std::abs(r.s - r.expected_s) <= r.step_s + 1e-12 && std::abs(r.v - 1.0) <= r.step_v + 1e-12 &&
                    std::abs(r.error - r.expected_error) <= 1e-10;
    pass &= ok;
    detail += "eps=" + fmt(eps) + ": worst (s, v) = (" + fmt(r.s) + ", " + fmt(r.v) + ") error " + fmt(r.error) +
              " vs expected (" + fmt(r.expected_s) + ", 1) error " + fmt(r.expected_error) + "; ";
  }
  return {pass, detail + "201x201 grid on the ball (1-s)^2|mu|^2 + d sigma^2 (sqrt v - 1)^2 <= eps^2, d=10"};
}

Outcome proposition3() {
  Rng rng(6);
  double worst = 0.0;
  for (auto [l1, l2] : {std::pair{0.0, 1.0}, std::pair{1.0, 1.0}, std::pair{5.0, 0.5}}) {
    const Vector mu = normal_vector(10, rng).normalized();
    const LabeledDataset population(Matrix(mu.transpose()), {1}, LabelMode::binary);
    const ProjectionPenalty penalty(mu);
    TrainConfig c;
    c.loss = LossKind::linear_yfx;
    c.lambda1 = l1;
    c.lambda2 = l2;
    c.alpha_reg = 0.0;
    c.steps = 5000;
    const auto clf = train(population, std::nullopt, c, &penalty);
    worst = std::max(worst, (clf.theta - oracle::ridge_projection_optimum(mu, l1, l2)).norm());
  }
  return {worst <= 1e-4, "max |theta - closed form| " + fmt(worst) + " over 3 (lambda1, lambda2) pairs, d=10"};
}

Outcome regularizer_closed_form() {
  const auto model = ConditionalGaussianModel::axis_aligned(2, 1.0, 1.0);
  const auto data = sample_conditional_gaussian(model, 10000, 71);
  const auto classes = split_by_class(data);
  const auto map = estimate_map(classes.at(-1), classes.at(1));
  Vector theta(2);
  theta << 0.8, -0.6;
  const LinearClassifier clf(theta);
  const double value = smoothness_regularizer(clf, map, -1, 1, LossKind::linear_yfx, uniform_grid(64));
  const double expected = 2.0 * std::abs(theta.dot(model.mu()));
  const double rel = std::abs(value - expected) / expected;

  const GeodesicSegment seg = GeodesicSegment::from(map, -1, 1);
  const LinearClassifier smooth(theta, 0.2);
  double worst_fd = 0.0;
  for (double t : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const double analytic = performance_geodesic(smooth, seg, LossKind::logistic, {t}).dloss_dt[0];
    const double fd = oracle::central_difference(
        [&](double s) { return performance_geodesic(smooth, seg, LossKind::logistic, {s}).loss[0]; }, t, 1e-4);
    worst_fd = std::max(worst_fd, std::abs(analytic - fd));
  }
  return {rel <= 0.03 && worst_fd <= 1e-5,
          "Reg " + fmt(value) + " vs 2|theta.mu| = " + fmt(expected) + " (relative " + fmt(rel) +
              ", n=10000, 64 nodes), max |dR/dt - finite difference| " + fmt(worst_fd)};
}

Outcome mixup_equivalence() {
  Rng rng(8);
  double worst = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    const std::size_t n = 2 + rng.below(20);
    const std::size_t d = 1 + rng.below(5);
    Matrix x0(n, d), x1(n, d);
    for (Eigen::Index i = 0; i < x0.rows(); ++i)
      for (Eigen::Index j = 0; j < x0.cols(); ++j) {
        x0(i, j) = rng.normal();
        x1(i, j) = rng.normal();
      }
    std::vector<std::size_t> pairing(n);
    std::iota(pairing.begin(), pairing.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(pairing[i - 1], pairing[rng.below(i)]);
    TransportPlan plan;
    plan.coupling = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
      plan.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pairing[i])) = 1.0 / double(n);
    const BarycentricMap map(plan, x0, x1);
    const double t = rng.uniform();
    const auto a = interpolate(map, -1, 1, t);
    const auto b = mixup_mode(x0, x1, pairing, -1, 1, t);
    worst = std::max(worst, (a.samples - b.samples).cwiseAbs().maxCoeff());
    if (a.soft_labels != b.soft_labels || a.hard_labels != b.hard_labels) worst = INFINITY;
  }
  return {worst <= 1e-12, "max deviation " + fmt(worst) + " over 50 draws"};
}

Outcome robustness_agreement() {
  Rng rng(9);
  const auto model = ConditionalGaussianModel::axis_aligned(5, 1.0, 1.0);
  const double eps = 0.2, sigma_s = 0.8;
  double worst_z = 0.0;
  bool monotone = true;
  for (int k = 0; k < 10; ++k) {
    Vector theta = model.mu() + 0.8 * normal_vector(5, rng);
    if (theta.dot(model.mu()) < 0.0) theta = -theta;
    const LinearClassifier clf(theta);
    const auto seeds = rng.split(static_cast<std::uint64_t>(k));
    const auto fgsm = monte_carlo_error(model, clf, 100000, Attack::fgsm(eps), seeds.split(1).key());
    const auto noise = monte_carlo_error(model, clf, 100000, Attack::gaussian(sigma_s), seeds.split(2).key());
    worst_z = std::max({worst_z, std::abs(fgsm.standard.value - standard_error(model, clf)) / fgsm.standard.se,
                        std::abs(fgsm.robust->value - linf_robust_error(model, clf, eps)) / fgsm.robust->se,
                        std::abs(noise.smoothed->value - smoothed_error(model, clf, sigma_s)) / noise.smoothed->se});
    double prev_r = standard_error(model, clf), prev_s = prev_r;
    for (int i = 1; i <= 1000; ++i) {
      const double r = linf_robust_error(model, clf, 0.003 * i);
      const double s = smoothed_error(model, clf, 0.01 * i);
      monotone &= r >= prev_r && s >= prev_s;
      prev_r = r;
      prev_s = s;
    }
  }
  return {worst_z <= 3.0 && monotone,
          "max |analytic - MC| " + fmt(worst_z) + " SE over 10 classifiers x 3 errors, monotone " +
              (monotone ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism_and_lp() {
  const fs::path root = fs::temp_directory_path() / "geoaug_acceptance_10";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string exe = GEOAUG_CLI_PATH;
  bool identical = true;
  std::string detail;
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"theorem1 --n1_grid 50,200 --r_grid 0.5,0.9 --trials 20 --seed 7",
       {"theorem1_trials.csv", "theorem1_summary.csv", "theorem1_trends.csv"}},
      {"curve --n 100 --steps 200 --mc_samples 1000 --seed 7", {"curve.csv", "curve_summary.csv"}},
      {"oracle-suite --n 1000 --reg_samples 2000 --mc_samples 5000 --seed 7", {"oracle_suite.csv"}}};
  int index = 0;
  for (const auto& [args, files] : runs) {
    for (const char* tag : {"a", "b"}) {
      const fs::path out = root / (std::to_string(index) + tag);
      const std::string cmd = exe + " " + args + " --out " + out.string() + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        identical = false;
        detail += "'" + args + "' failed; ";
      }
    }
    for (const auto& f : files) {
      const fs::path a = root / (std::to_string(index) + "a") / f, b = root / (std::to_string(index) + "b") / f;
      if (!fs::exists(a) || slurp(a) != slurp(b)) {
        identical = false;
        detail += f + " differs or is missing; ";
      }
    }
    ++index;
  }
  {
    Matrix x(200, 2);
    std::vector<int> y(200);
    Rng rng(10);
    for (int i = 0; i < 200; ++i) {
      y[i] = i % 2 ? 1 : -1;
      x(i, 0) = rng.normal() + 1.5 * y[i];
      x(i, 1) = rng.normal();
    }
    std::ofstream csv(root / "input.csv");
    csv << "f0,f1,label\n";
    csv.precision(17);
    for (int i = 0; i < 200; ++i) csv << x(i, 0) << "," << x(i, 1) << "," << y[i] << "\n";
  }
  for (const char* tag : {"a", "b"}) {
    const std::string cmd = exe + " augment --input " + (root / "input.csv").string() +
                            " --batch_size 32 --seed 7 --out " + (root / (std::string("aug") + tag)).string() +
                            " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      identical = false;
      detail += "augment failed; ";
    }
  }
  if (!fs::exists(root / "auga" / "augmented.csv") ||
      slurp(root / "auga" / "augmented.csv") != slurp(root / "augb" / "augmented.csv")) {
    identical = false;
    detail += "augmented.csv differs or is missing; ";
  }
  fs::remove_all(root);

  Rng rng(11);
  double worst = 0.0;
  int instances = 0;
  SinkhornOptions o;
  o.epsilon = 1e-3;
  o.max_iter = 100000;
  for (std::size_t n0 = 1; n0 <= 6; ++n0) {
    for (std::size_t n1 = 1; n1 <= 6; ++n1, ++instances) {
      Matrix a(n0, 2), b(n1, 2);
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform();
      for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform();
      const auto ma = DiscreteMeasure::uniform(a), mb = DiscreteMeasure::uniform(b);
      const auto c = cost_matrix(ma, mb);
      worst = std::max(worst, std::abs(entropic_cost(sinkhorn(ma, mb, o), c) - oracle::uniform_lp_ot(c.values)));
    }
  }
  return {identical && worst <= 1e-2,
          std::string("CLI reruns ") + (identical ? "bit-identical" : "differ") + " (theorem1, curve, oracle-suite, augment); " +
              detail + "max |entropic - LP| " + fmt(worst) + " over " + std::to_string(instances) +
              " instances with n0, n1 <= 6"};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"Gaussian W2 oracle", gaussian_w2_oracle},
      {"map oracle", map_oracle},
      {"displacement interpolation", displacement},
      {"Theorem 1 reproduction", theorem1},
      {"Proposition 1 worst case on the Wasserstein ball", proposition1},
      {"Proposition 3 closed form", proposition3},
      {"regularizer closed form", regularizer_closed_form},
      {"mixup equivalence", mixup_equivalence},
      {"analytic/MC robustness agreement", robustness_agreement},
      {"determinism and LP oracle", determinism_and_lp},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all &= o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].title
              << "): " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
