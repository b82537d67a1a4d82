#include <algorithm>
#include <map>
#include <ostream>

#include "common.hpp"
#include "geoaug/cli/commands.hpp"
#include "geoaug/csv_writer.hpp"
#include "geoaug/rng.hpp"
#include "geoaug/robustness.hpp"

namespace geoaug::cli {
namespace {

struct Cell {
  std::size_t n1;
  double r;
  std::size_t improved = 0;
  double gap_sum = 0.0;
};

// 1 when the frequencies along `values` (sorted ascending) never decrease.
bool nondecreasing(const std::vector<double>& freqs) {
  for (std::size_t k = 1; k < freqs.size(); ++k) {
    if (freqs[k] < freqs[k - 1]) return false;
  }
  return true;
}

void run_theorem1(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const auto model = model_from(c);
  const std::size_t n0 = c.get_count("n0");
  if (n0 < 1) throw UsageError("config key 'n0': must be >= 1");
  auto n1_grid = c.get_counts("n1_grid");
  auto r_grid = c.get_doubles("r_grid");
  for (const double r : r_grid) {
    if (r < 0.0 || r > 1.0) throw UsageError("config key 'r_grid': values must lie in [0, 1]");
  }
  std::sort(n1_grid.begin(), n1_grid.end());
  std::sort(r_grid.begin(), r_grid.end());
  const double eps = c.get_nonnegative("eps");
  const std::size_t trials = c.get_count("trials");
  if (trials < 1) throw UsageError("config key 'trials': must be >= 1");
  Theorem1Options opts;
  if (c.get_bool("empirical")) opts.source = AugmentSource::empirical;
  opts.sinkhorn = sinkhorn_from(c);
  const Rng base(c.get_u64("seed"));
  const auto comments = c.echo();

  std::vector<Theorem1Row> rows;
  std::vector<Cell> cells;
  for (const std::size_t n1 : n1_grid) {
    for (const double r : r_grid) {
      Cell cell{n1, r};
      for (std::size_t k = 0; k < trials; ++k) {
        // Trial k uses the same seed in every cell so cells differ only in (n1, r).
        const auto res = theorem1_trial(model, n0, n1, r, eps, base.split(k).key(), opts);
        cell.improved += res.improved ? 1 : 0;
        cell.gap_sum += res.pe_orig - res.pe_aug;
        rows.push_back({k, n0, n1, r, eps, res});
      }
      cells.push_back(cell);
    }
  }
  if (c.get_bool("write_trials")) write_theorem1_csv(rows, out / "theorem1_trials.csv", comments);

  CsvWriter summary;
  summary.comments(comments);
  summary.header({"n0", "n1", "r", "eps", "trials", "improved", "frequency", "mean_gap", "bound",
                  "p_norm", "p_a", "p_b"});
  std::map<std::size_t, std::vector<double>> by_n1;  // frequencies along r
  std::map<double, std::vector<double>> by_r;        // frequencies along n1
  for (const auto& cell : cells) {
    const double freq = static_cast<double>(cell.improved) / static_cast<double>(trials);
    const auto b = theorem1_bound(model, n0, cell.n1, cell.r);
    summary.field(n0).field(cell.n1).field(cell.r).field(eps).field(trials).field(cell.improved);
    summary.field(freq).field(cell.gap_sum / static_cast<double>(trials));
    summary.field(b.bound).field(b.p_norm).field(b.p_a).field(b.p_b);
    summary.end_row();
    by_n1[cell.n1].push_back(freq);
    by_r[cell.r].push_back(freq);
    log << "n1=" << cell.n1 << " r=" << short_number(cell.r) << " improved "
        << cell.improved << "/" << trials << "\n";
  }
  summary.save(out / "theorem1_summary.csv");

  CsvWriter trends;
  trends.comments(comments);
  trends.header({"axis", "fixed", "monotone"});
  for (const auto& [n1, freqs] : by_n1) {
    trends.field("r").field(n1).field(nondecreasing(freqs) ? 1 : 0);
    trends.end_row();
  }
  for (const auto& [r, freqs] : by_r) {
    trends.field("n1").field(r).field(nondecreasing(freqs) ? 1 : 0);
    trends.end_row();
  }
  trends.save(out / "theorem1_trends.csv");
}

}  // namespace

Command theorem1_command() {
  return {"theorem1",
          "Improvement frequency of the pooled estimator over (n1, r) cells",
          join(model_keys(),
               {{"n0", "20", "original sample count"},
                {"n1_grid", "200", "augmented sample counts (comma separated)"},
                {"r_grid", "0.9", "contraction factors r = 1 - 2t (comma separated)"},
                {"eps", "0.1", "l_inf attack radius"},
                {"trials", "100", "trials per cell"},
                {"empirical", "false", "augment through Sinkhorn barycentric maps"},
                {"sinkhorn_eps", "0.01", "entropic coefficient for the empirical source"},
                {"sinkhorn_max_iter", "10000", "Sinkhorn iteration cap"},
                {"write_trials", "true", "also write every trial"}}),
          run_theorem1};
}

}  // namespace geoaug::cli
