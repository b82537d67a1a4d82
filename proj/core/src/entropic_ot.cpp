#include "geoaug/entropic_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCore>

#include "geoaug/csv_writer.hpp"
#include "geoaug/error.hpp"

namespace geoaug {
namespace {

// Scalings beyond these bounds are absorbed into the potentials. Sparse kernels
// need the tight bound (see kSparseLog); dense ones only guard against overflow.
constexpr double kAbsorbLog = 10.0;
constexpr double kAbsorbLogDense = 100.0;
constexpr double kAnnealFactor = 0.35;   // epsilon ratio between annealing stages
constexpr std::size_t kCheckEvery = 10;  // marginal check period (iterations)
constexpr std::size_t kStageCap = 200;   // iteration cap for intermediate stages
// Over-relaxed scaling updates u <- u^(1-w) (a / K v)^w in the final stage after
// 100 sweeps; dropped back to w = 1 after three successive rises of
// the violation.
constexpr double kOverRelax = 1.8;
constexpr std::size_t kRelaxAfter = 100;
// Kernel entries below e^-460 (~1e-200) are flushed to zero; products with them
// would otherwise land in the subnormal range, which is orders of magnitude slower.
constexpr double kLogFloor = -460.0;
// Stabilized kernel entries below e^-50 are dropped when few enough survive. With
// scalings bounded by e^10 each dropped entry carries at most e^-30 of mass.
constexpr double kSparseLog = -50.0;
constexpr double kSparseDensity = 0.25;
// A final stage still above tolerance after this many sweeps hands over to
// Newton steps on the dual.
constexpr std::size_t kNewtonAfter = 300;

// out_i = LSE_j((g_j - C_ij) / e)
Vector row_lse(const Matrix& c, const Vector& g, double e) {
  Vector out(c.rows());
  Eigen::ArrayXd z(c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    z = g.array() - c.row(i).transpose().array();
    const double m = z.maxCoeff();
    out(i) = m / e + std::log(((z - m) / e).max(kLogFloor).exp().sum());
  }
  return out;
}

// out_j = LSE_i((f_i - C_ij) / e)
Vector col_lse(const Matrix& c, const Vector& f, double e) {
  Eigen::ArrayXd m = Eigen::ArrayXd::Constant(c.cols(), -std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    m = m.max(f(i) - c.row(i).transpose().array());
  }
  Eigen::ArrayXd s = Eigen::ArrayXd::Zero(c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    s += ((f(i) - c.row(i).transpose().array() - m) / e).max(kLogFloor).exp();
  }
  return (m / e + s.log()).matrix();
}

void build_kernel(const Matrix& c, const Vector& f, const Vector& g, double e, Matrix& k) {
  k.resize(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const Eigen::ArrayXd z = (f(i) + g.array() - c.row(i).transpose().array()) / e;
    k.row(i) = (z < kLogFloor).select(0.0, z.exp()).transpose();
  }
}

// exp((f_i + g_j - C_ij) / e), stored sparse when most entries are negligible.
class Kernel {
 public:
  void build(const Matrix& c, const Vector& f, const Vector& g, double e) {
    const auto cap = static_cast<std::size_t>(kSparseDensity * static_cast<double>(c.size()));
    outer_.assign(1, 0);
    inner_.clear();
    values_.clear();
    Eigen::ArrayXd z(c.cols());
    sparse_ = true;
    for (Eigen::Index i = 0; i < c.rows() && sparse_; ++i) {
      z = (f(i) + g.array() - c.row(i).transpose().array()) / e;
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (z(j) > kSparseLog) {
          inner_.push_back(static_cast<int>(j));
          values_.push_back(z(j));
        }
      }
      outer_.push_back(static_cast<int>(inner_.size()));
      sparse_ = inner_.size() <= cap;
    }
    if (!sparse_) {
      build_kernel(c, f, g, e, dense_);
      return;
    }
    dense_.resize(0, 0);
    Eigen::Map<Eigen::ArrayXd> vals(values_.data(), static_cast<Eigen::Index>(values_.size()));
    vals = vals.exp();
    rows_ = c.rows();
    cols_ = c.cols();
  }

  bool sparse() const noexcept { return sparse_; }

  void apply(const Vector& v, Vector& out) const {
    if (sparse_) {
      out.noalias() = csr() * v;
    } else {
      out.noalias() = dense_ * v;
    }
  }

  void apply_transpose(const Vector& u, Vector& out) const {
    if (sparse_) {
      out.noalias() = csr().transpose() * u;
    } else {
      out.noalias() = dense_.transpose() * u;
    }
  }

 private:
  using Csr = Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>>;
  Csr csr() const {
    return Csr(rows_, cols_, static_cast<Eigen::Index>(values_.size()), outer_.data(),
               inner_.data(), values_.data());
  }

  bool sparse_ = false;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<int> outer_;
  std::vector<int> inner_;
  std::vector<double> values_;
  Matrix dense_;
};

// Exact log-domain Sinkhorn sweep.
void log_domain_update(const Matrix& c, const Vector& log_a, const Vector& log_b, double e,
                       Vector& f, Vector& g) {
  f = e * (log_a - row_lse(c, g, e));
  g = e * (log_b - col_lse(c, f, e));
}

// Dual objective <f, a> + <g, b> - e * mass(P), P = exp((f + g - C) / e).
double dual_value(double mass, const Vector& a, const Vector& b, const Vector& f,
                  const Vector& g, double e) {
  return f.dot(a) + g.dot(b) - e * mass;
}

// Damped Newton ascent on the dual potentials. The Hessian system
// [diag(P 1), P; P^T, diag(P^T 1)] d = e * (a - P 1, b - P^T 1) is solved by
// Jacobi-preconditioned conjugate gradients; each CG product counts as one iteration.
void newton_refine(const Matrix& c, const Vector& a, const Vector& b, double e, double tol,
                   std::size_t max_iter, Vector& f, Vector& g, std::size_t& iters) {
  const Eigen::Index n = c.rows(), m = c.cols();
  const Vector ones_n = Vector::Ones(n), ones_m = Vector::Ones(m);
  Kernel p, trial;
  Vector rows, cols, trial_rows, v_n, v_m;
  p.build(c, f, g, e);
  p.apply(ones_m, rows);
  p.apply_transpose(ones_n, cols);
  while (iters < max_iter) {
    const Vector r = a - rows, s = b - cols;
    const double violation = std::max(r.cwiseAbs().maxCoeff(), s.cwiseAbs().maxCoeff());
    if (violation <= tol) return;

    const Vector diag_r = rows.array().max(1e-300).matrix();
    const Vector diag_c = cols.array().max(1e-300).matrix();
    Vector rhs(n + m);
    rhs << e * r, e * s;
    Vector x = Vector::Zero(n + m), res = rhs, z(n + m), dir(n + m), hd(n + m);
    auto precondition = [&](const Vector& in, Vector& out) {
      out.head(n) = in.head(n).cwiseQuotient(diag_r);
      out.tail(m) = in.tail(m).cwiseQuotient(diag_c);
    };
    precondition(res, z);
    dir = z;
    double rz = res.dot(z);
    const double stop = std::min(0.1, std::sqrt(violation)) * rhs.norm();
    for (std::size_t k = 0; k < static_cast<std::size_t>(n + m) && iters < max_iter; ++k) {
      p.apply(dir.tail(m), v_n);
      p.apply_transpose(dir.head(n), v_m);
      hd.head(n) = diag_r.cwiseProduct(dir.head(n)) + v_n;
      hd.tail(m) = v_m + diag_c.cwiseProduct(dir.tail(m));
      ++iters;
      const double curvature = dir.dot(hd);
      if (!(curvature > 0.0)) break;
      const double alpha = rz / curvature;
      x += alpha * dir;
      res -= alpha * hd;
      if (res.norm() <= stop) break;
      precondition(res, z);
      const double rz_next = res.dot(z);
      dir = z + (rz_next / rz) * dir;
      rz = rz_next;
    }

    const double current = dual_value(rows.sum(), a, b, f, g, e);
    const double slope = x.dot(rhs) / e;
    double step = 1.0;
    Vector f_new, g_new;
    for (int halvings = 0;; ++halvings) {
      f_new = f + step * x.head(n);
      g_new = g + step * x.tail(m);
      trial.build(c, f_new, g_new, e);
      trial.apply(ones_m, trial_rows);
      if (dual_value(trial_rows.sum(), a, b, f_new, g_new, e) >= current + 1e-4 * step * slope) break;
      if (halvings == 30) return;
      step *= 0.5;
    }
    f = std::move(f_new);
    g = std::move(g_new);
    std::swap(p, trial);
    rows = trial_rows;
    p.apply_transpose(ones_n, cols);
  }
}

bool scalings_ok(const Vector& s) {
  if (!s.allFinite()) return false;
  const double lo = s.minCoeff();
  return lo > 0.0;
}

double max_abs_log(const Vector& s) {
  return std::max(std::abs(std::log(s.maxCoeff())), std::abs(std::log(s.minCoeff())));
}

void check_weights(const Vector& w, const char* what) {
  if (w.size() < 1 || !w.allFinite() || w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-9) {
    throw InvalidArgument(std::string("sinkhorn: ") + what + " weights must lie on the simplex");
  }
}

}  // namespace

CostMatrix cost_matrix(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) {
    throw InvalidArgument("cost_matrix: dimension mismatch (" + std::to_string(x.cols()) + " vs " +
                          std::to_string(y.cols()) + ")");
  }
  CostMatrix c{Matrix(x.rows(), y.rows())};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    c.values.row(i) = (y.rowwise() - x.row(i)).rowwise().squaredNorm().transpose();
  }
  return c;
}

CostMatrix cost_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return cost_matrix(a.points(), b.points());
}

double median_cost(const CostMatrix& cost) {
  if (cost.values.size() == 0) throw InvalidArgument("median_cost: empty cost matrix");
  std::vector<double> v(cost.values.data(), cost.values.data() + cost.values.size());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double med = *mid;
  if (v.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(v.begin(), mid));
  }
  if (med > 0.0) return med;
  const double mx = cost.values.maxCoeff();
  return mx > 0.0 ? mx : 1.0;
}

double marginal_violation(const Matrix& coupling, const Vector& source_weights,
                          const Vector& target_weights) {
  const double rows = (coupling.rowwise().sum() - source_weights).cwiseAbs().maxCoeff();
  const double cols =
      (coupling.colwise().sum().transpose() - target_weights).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

TransportPlan sinkhorn(const CostMatrix& cost, const Vector& source_weights,
                       const Vector& target_weights, const SinkhornOptions& options) {
  const auto& c_raw = cost.values;
  if (static_cast<Eigen::Index>(source_weights.size()) != c_raw.rows() ||
      static_cast<Eigen::Index>(target_weights.size()) != c_raw.cols()) {
    throw InvalidArgument("sinkhorn: weight sizes do not match the cost matrix");
  }
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    throw InvalidArgument("sinkhorn: epsilon must be positive");
  }
  if (!(options.tol > 0.0)) throw InvalidArgument("sinkhorn: tol must be positive");
  if (!c_raw.allFinite() || c_raw.minCoeff() < 0.0) {
    throw InvalidArgument("sinkhorn: costs must be finite and nonnegative");
  }
  check_weights(source_weights, "source");
  check_weights(target_weights, "target");

  double scale = 1.0;
  if (options.cost_scale) {
    if (!(*options.cost_scale > 0.0)) throw InvalidArgument("sinkhorn: cost_scale must be positive");
    scale = *options.cost_scale;
  } else if (options.normalize_cost) {
    scale = median_cost(cost);
  }
  const Matrix c = c_raw / scale;
  const double eps = options.epsilon;

  // Zero-mass entries never carry transport; give them a finite log so the
  // log-domain sweeps stay finite.
  const Vector log_a = source_weights.array().max(1e-300).log().matrix();
  const Vector log_b = target_weights.array().max(1e-300).log().matrix();
  const Vector& a = source_weights;
  const Vector& b = target_weights;

  // Self-transport problems use the averaged symmetric fixed point u = sqrt(u * a / (K u)),
  // which converges in a few sweeps at any epsilon, so they skip the annealing.
  const bool symmetric = c.rows() == c.cols() && a == b && c == c.transpose();
  auto symmetrize = [&](Vector& f, Vector& g) {
    if (symmetric) g = f = 0.5 * (f + g);
  };

  double e = eps;
  if (options.epsilon_scaling && !symmetric) {
    const double start = options.normalize_cost || options.cost_scale ? 1.0 : median_cost(cost);
    e = std::max(eps, start);
  }

  Vector f = Vector::Zero(c.rows());
  Vector g = Vector::Zero(c.cols());
  if (e == eps) {
    log_domain_update(c, log_a, log_b, e, f, g);
    symmetrize(f, g);
  }

  const double stage_tol =
      std::max(options.tol, 0.05 / static_cast<double>(std::max(c.rows(), c.cols())));
  std::size_t iters = 0;
  double violation = std::numeric_limits<double>::infinity();
  Kernel k;
  Vector u, v, kv, ktu;

  for (;;) {
    const bool final_stage = e <= eps;
    k.build(c, f, g, e);
    u = Vector::Ones(c.rows());
    v = Vector::Ones(c.cols());
    std::size_t stage_iters = 0;
    violation = std::numeric_limits<double>::infinity();
    bool relax = false;
    bool relax_allowed = final_stage && !symmetric;
    int rises = 0;
    bool newton = false;
    while (iters < options.max_iter && (final_stage || stage_iters < kStageCap)) {
      if (final_stage && !symmetric && stage_iters >= kNewtonAfter) {
        newton = true;
        break;
      }
      if (symmetric) {
        k.apply(u, kv);
        u = (u.cwiseProduct(a).cwiseQuotient(kv)).cwiseSqrt();
        v = u;
      } else if (relax) {
        k.apply(v, kv);
        u = u.array().pow(1.0 - kOverRelax) * a.cwiseQuotient(kv).array().pow(kOverRelax);
        k.apply_transpose(u, ktu);
        v = v.array().pow(1.0 - kOverRelax) * b.cwiseQuotient(ktu).array().pow(kOverRelax);
      } else {
        k.apply(v, kv);
        u = a.cwiseQuotient(kv);
        k.apply_transpose(u, ktu);
        v = b.cwiseQuotient(ktu);
      }
      ++iters;
      ++stage_iters;

      if (!scalings_ok(u) || !scalings_ok(v)) {
        // Kernel underflow: fall back to an exact log-domain sweep.
        log_domain_update(c, log_a, log_b, e, f, g);
        symmetrize(f, g);
        if (!f.allFinite() || !g.allFinite()) {
          throw NumericalFailure("sinkhorn: non-finite dual potentials");
        }
        k.build(c, f, g, e);
        u.setOnes();
        v.setOnes();
        continue;
      }
      const double bound = k.sparse() ? kAbsorbLog : kAbsorbLogDense;
      if (max_abs_log(u) > bound || max_abs_log(v) > bound) {
        f += e * u.array().log().matrix();
        g += e * v.array().log().matrix();
        k.build(c, f, g, e);
        u.setOnes();
        v.setOnes();
        continue;
      }
      if (stage_iters % kCheckEvery == 0 || iters == options.max_iter) {
        k.apply(v, kv);
        const double previous = violation;
        violation = (u.cwiseProduct(kv) - a).cwiseAbs().maxCoeff();
        if (relax) {
          k.apply_transpose(u, ktu);
          violation = std::max(violation, (v.cwiseProduct(ktu) - b).cwiseAbs().maxCoeff());
        }
        if (violation <= (final_stage ? options.tol : stage_tol)) break;
        rises = violation > previous ? rises + 1 : 0;
        if (relax && rises >= 3) {
          relax = false;
          relax_allowed = false;
        } else if (relax_allowed && stage_iters >= kRelaxAfter) {
          relax = true;
        }
      }
    }
    f += e * u.array().log().matrix();
    g += e * v.array().log().matrix();
    if (!f.allFinite() || !g.allFinite()) {
      throw NumericalFailure("sinkhorn: non-finite dual potentials");
    }
    if (newton) {
      newton_refine(c, a, b, e, options.tol, options.max_iter, f, g, iters);
      if (!f.allFinite() || !g.allFinite()) {
        throw NumericalFailure("sinkhorn: non-finite dual potentials");
      }
    }
    if (final_stage || iters >= options.max_iter) break;
    e = std::max(eps, e * kAnnealFactor);
  }

  TransportPlan plan;
  build_kernel(c, f, g, e, plan.coupling);
  if (!plan.coupling.allFinite()) throw NumericalFailure("sinkhorn: non-finite coupling");
  plan.source_weights = a;
  plan.target_weights = b;
  plan.epsilon = eps;
  plan.cost_scale = scale;
  plan.iterations = iters;
  plan.marginal_violation = marginal_violation(plan.coupling, a, b);
  plan.converged = e <= eps && plan.marginal_violation <= options.tol;
  plan.source_potential = f * scale;
  plan.target_potential = g * scale;
  return plan;
}

TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const SinkhornOptions& options) {
  return sinkhorn(cost_matrix(a, b), a.weights(), b.weights(), options);
}

double entropic_cost(const TransportPlan& plan, const CostMatrix& cost) {
  if (plan.coupling.rows() != cost.values.rows() || plan.coupling.cols() != cost.values.cols()) {
    throw InvalidArgument("entropic_cost: plan and cost shapes differ");
  }
  return plan.coupling.cwiseProduct(cost.values).sum();
}

DebiasedCost debiased_transport_cost(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                     const SinkhornOptions& options) {
  const CostMatrix cab = cost_matrix(a, b);
  SinkhornOptions shared = options;
  if (!shared.cost_scale) shared.cost_scale = options.normalize_cost ? median_cost(cab) : 1.0;

  const auto pab = sinkhorn(cab, a.weights(), b.weights(), shared);
  const CostMatrix caa = cost_matrix(a, a);
  const auto paa = sinkhorn(caa, a.weights(), a.weights(), shared);
  const CostMatrix cbb = cost_matrix(b, b);
  const auto pbb = sinkhorn(cbb, b.weights(), b.weights(), shared);

  DebiasedCost out{};
  out.cross = entropic_cost(pab, cab);
  out.self_source = entropic_cost(paa, caa);
  out.self_target = entropic_cost(pbb, cbb);
  out.value = out.cross - 0.5 * (out.self_source + out.self_target);
  out.converged = pab.converged && paa.converged && pbb.converged;
  return out;
}

BarycenterResult debiased_barycenter(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                     double weight_a, double weight_b, const Matrix& support,
                                     const SinkhornOptions& options) {
  if (!(weight_a > 0.0) || !(weight_b > 0.0) || std::abs(weight_a + weight_b - 1.0) > 1e-12) {
    throw InvalidArgument("debiased_barycenter: weights must be positive and sum to 1");
  }
  if (support.rows() < 1) throw InvalidArgument("debiased_barycenter: empty support");
  if (a.dim() != b.dim() || static_cast<std::size_t>(support.cols()) != a.dim()) {
    throw InvalidArgument("debiased_barycenter: dimension mismatch");
  }
  if (!(options.epsilon > 0.0)) throw InvalidArgument("debiased_barycenter: epsilon must be positive");

  const CostMatrix ca = cost_matrix(a.points(), support);
  const CostMatrix cb = cost_matrix(b.points(), support);
  const CostMatrix cs = cost_matrix(support, support);

  double scale = 1.0;
  if (options.cost_scale) {
    scale = *options.cost_scale;
  } else if (options.normalize_cost) {
    CostMatrix both{Matrix(ca.values.rows() + cb.values.rows(), support.rows())};
    both.values.topRows(ca.values.rows()) = ca.values;
    both.values.bottomRows(cb.values.rows()) = cb.values;
    scale = median_cost(both);
  }
  const double e = options.epsilon;
  const Matrix ka = -ca.values / (scale * e);  // log kernels
  const Matrix kb = -cb.values / (scale * e);
  const Matrix ks = -cs.values / (scale * e);

  // LSE over columns of (logk + x) per row, and over rows per column.
  auto lse_rows = [](const Matrix& logk, const Vector& x) {
    Vector out(logk.rows());
    for (Eigen::Index i = 0; i < logk.rows(); ++i) {
      const Eigen::ArrayXd z = logk.row(i).transpose().array() + x.array();
      const double m = z.maxCoeff();
      out(i) = m + std::log((z - m).max(kLogFloor).exp().sum());
    }
    return out;
  };
  auto lse_cols = [](const Matrix& logk, const Vector& x) {
    Eigen::ArrayXd m =
        Eigen::ArrayXd::Constant(logk.cols(), -std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < logk.rows(); ++i) m = m.max(logk.row(i).transpose().array() + x(i));
    Eigen::ArrayXd s = Eigen::ArrayXd::Zero(logk.cols());
    for (Eigen::Index i = 0; i < logk.rows(); ++i) {
      s += (logk.row(i).transpose().array() + x(i) - m).max(kLogFloor).exp();
    }
    return Vector((m + s.log()).matrix());
  };

  const Vector log_wa = a.weights().array().max(1e-300).log().matrix();
  const Vector log_wb = b.weights().array().max(1e-300).log().matrix();
  const Eigen::Index m = support.rows();
  Vector lb_a = Vector::Zero(m), lb_b = Vector::Zero(m), ld = Vector::Zero(m);
  Vector alpha = Vector::Constant(m, 1.0 / static_cast<double>(m));

  BarycenterResult out;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    const Vector la_a = log_wa - lse_rows(ka, lb_a);
    const Vector la_b = log_wb - lse_rows(kb, lb_b);
    const Vector kta_a = lse_cols(ka, la_a);
    const Vector kta_b = lse_cols(kb, la_b);
    const Vector lalpha = ld + weight_a * kta_a + weight_b * kta_b;
    lb_a = lalpha - kta_a;
    lb_b = lalpha - kta_b;
    ld = 0.5 * (ld + lalpha - lse_rows(ks, ld));
    if (!lalpha.allFinite() || !ld.allFinite()) {
      throw NumericalFailure("debiased_barycenter: non-finite scalings");
    }
    const Vector next = lalpha.array().exp().matrix();
    out.change = (next - alpha).cwiseAbs().maxCoeff();
    alpha = next;
    out.iterations = it + 1;
    if (out.change <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.weights = alpha / alpha.sum();
  return out;
}

void write_plan_csv(const TransportPlan& plan, const std::filesystem::path& path,
                    const std::vector<std::string>& comments) {
  CsvWriter w;
  w.comments(comments);
  w.header({"i", "j", "mass"});
  for (Eigen::Index i = 0; i < plan.coupling.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.coupling.cols(); ++j) {
      const double m = plan.coupling(i, j);
      if (m > 1e-12) {
        w.field(i).field(j).field(m);
        w.end_row();
      }
    }
  }
  w.save(path);
}

}  // namespace geoaug
