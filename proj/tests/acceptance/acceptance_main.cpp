// Acceptance checks. Each check prints one [PASS]/[FAIL] line with the
// measured statistic next to its pinned threshold.
#include "ose/csv.hpp"
#include "ose/embedding.hpp"
#include "ose/experiment_config.hpp"
#include "ose/instances.hpp"
#include "ose/linalg.hpp"
#include "ose/random.hpp"
#include "ose/regression.hpp"
#include "ose/sketch.hpp"
#include "ose/sparsity.hpp"
#include "ose/sweeps.hpp"

#include <CLI11.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ose;

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

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double birthday(std::size_t d, std::size_t m) {
  double none = 1.0;
  for (std::size_t i = 1; i < d; ++i) none *= 1.0 - static_cast<double>(i) / static_cast<double>(m);
  return 1.0 - none;
}

DenseMatrix gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng);
  return a;
}

Outcome interlacing() {
  Stopwatch clock;
  Rng rng(2024);
  std::size_t bad = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const std::size_t cols = 2 + rng.below(30);
    const std::size_t rows = 1 + rng.below(cols - 1);
    const DenseMatrix a = gaussian(rows, cols, rng);
    const DenseMatrix row = gaussian(cols, 1, rng);
    if (!interlacing_check(a, row.col(0)).interlaces) ++bad;
  }
  const double secs = clock.seconds();
  return {bad == 0 && secs < 10.0, fmt("violations=%zu/1000 (need 0), runtime=%.2fs (< 10s)", bad, secs)};
}

Outcome projection_norm() {
  Stopwatch clock;
  constexpr std::size_t n = 2000, trials = 100000;
  const std::vector<double> identity(n, 1.0);
  bool pass = true;
  std::string detail;
  for (std::size_t m : {50, 200}) {
    const auto ex = projection_norm_experiment(n, m, identity, trials, derive_seed(7, m), 0.5, 0);
    const double target = static_cast<double>(m) / n;
    const double z = std::abs(ex.mean - target) / ex.standard_error;
    pass = pass && z <= 4.0;
    detail += fmt("m=%zu mean_z=%.3f (<= 4)", m, z);
    if (m == 200) {
      pass = pass && ex.tail_fraction < 0.05;
      detail += fmt(" tail=%.5f (< 0.05)", ex.tail_fraction);
    }
    detail += "; ";
  }
  const double secs = clock.seconds();
  pass = pass && secs < 60.0;
  return {pass, detail + fmt("runtime=%.2fs (< 60s)", secs)};
}

// Pairs sharing a max-|.| row and sign, counted over all i < j.
std::uint64_t enumerate_collisions(const std::vector<ColumnProfile>& profiles) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < profiles.size(); ++i)
    for (std::size_t j = i + 1; j < profiles.size(); ++j)
      c += signed_class(profiles[i].row, profiles[i].value) == signed_class(profiles[j].row, profiles[j].value);
  return c;
}

Outcome collisions() {
  constexpr std::size_t d = 20, m = 50, n = 100 * d * d, trials = 10000;
  const SketchMatrix sketch = sample_sparse_sketch({n, m, SketchKind::kSparse, 1, 31});
  const auto p = signed_row_fractions(sketch);
  double sum_p2 = 0.0;
  for (double x : p) sum_p2 += x * x;
  const double expected = d * (d - 1) / 2.0 * sum_p2;

  std::size_t mismatches = 0;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto coords = sample_basis_coordinates(n, d, derive_seed(32, t));
    const auto profiles = max_coordinate_profile(sketch_columns(sketch, coords));
    const auto stats = collision_stats(profiles, p);
    if (stats.collisions != enumerate_collisions(profiles)) ++mismatches;
    const auto c = static_cast<double>(stats.collisions);
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum2 - trials * mean * mean) / (trials - 1.0) / trials);
  const double z = std::abs(mean - expected) / se;
  return {z <= 4.0 && mismatches == 0,
          fmt("mean_C=%.4f expected_C=%.4f z=%.3f (<= 4), enumeration mismatches=%zu (need 0)", mean, expected, z,
              mismatches)};
}

std::vector<double> random_distribution(std::size_t m, std::mt19937_64& gen) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& x : p) total += x = gen() % 5 == 0 ? 0.0 : std::pow(expo(gen), 2.0);
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& x : p) x /= total;
  return p;
}

Outcome alias() {
  std::mt19937_64 gen(99);
  std::size_t bad = 0;
  double worst = 0.0;
  std::size_t largest_m = 0;
  for (int v = 0; v < 100; ++v) {
    const std::size_t m = v == 0 ? 10000 : 1 + gen() % 10000;
    largest_m = std::max(largest_m, m);
    const auto p = random_distribution(m, gen);
    const auto table = alias_virtual_bins(p);
    bool ok = table.size() == m;
    double err = 0.0;
    for (const auto& vb : table.bins()) {
      ok = ok && vb.count >= 1 && vb.count <= 2;
      err = std::max(err, std::abs(vb.mass() - 1.0 / static_cast<double>(m)));
    }
    const auto masses = table.attributed_masses();
    for (std::size_t i = 0; i < m; ++i) err = std::max(err, std::abs(masses[i] - p[i]));
    worst = std::max(worst, err);
    if (!ok || err > 1e-12) ++bad;
  }

  const auto p = random_distribution(200, gen);
  const auto table = alias_virtual_bins(p);
  Rng rng(5);
  constexpr std::size_t draws = 100000;
  std::vector<double> counts(p.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) counts[table.sample(rng).second] += 1.0;
  double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p[i] * draws;
    if (e < 5.0) {
      pooled_obs += counts[i];
      pooled_exp += e;
    } else {
      stat += (counts[i] - e) * (counts[i] - e) / e;
      ++cells;
    }
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  const double pval = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared_distribution<double>(cells - 1.0), stat));
  return {bad == 0 && pval > 0.001,
          fmt("bad vectors=%zu/100 (need 0, largest m=%zu), max mass error=%.3g (<= 1e-12), chi-square p=%.4f "
              "(> 0.001)",
              bad, largest_m, worst, pval)};
}

Outcome phase_transition() {
  Stopwatch clock;
  constexpr std::size_t d = 20, n = 100 * d * d, trials = 10000;
  FailureOptions opts;
  opts.threads = 0;
  double rates[2];
  bool inside = true;
  std::string detail;
  const std::size_t ms[] = {400, 40000};
  for (int i = 0; i < 2; ++i) {
    const auto e = failure_probability({n, ms[i], SketchKind::kSparse, 1, 0}, InstanceFamily::kBasisColumns, d,
                                       0.3, trials, derive_seed(77, ms[i]), opts);
    const double oracle = birthday(d, ms[i]);
    rates[i] = e.rate;
    const bool in_ci = e.ci_low <= oracle && oracle <= e.ci_high;
    inside = inside && in_ci;
    detail += fmt("m=%zu rate=%.4f CI=[%.4f, %.4f] birthday=%.4f%s; ", ms[i], e.rate, e.ci_low, e.ci_high, oracle,
                  in_ci ? "" : " (outside CI)");
  }
  const double gap = rates[0] - rates[1];
  const double secs = clock.seconds();
  return {gap >= 0.5 && inside && secs < 300.0,
          detail + fmt("gap=%.4f (>= 0.5), runtime=%.2fs (< 300s)", gap, secs)};
}

Outcome dim_frontier() {
  Stopwatch clock;
  ExperimentConfig config = default_config(SweepKind::kDimFrontier);
  config.trials = 1000;
  const auto rows = run_dim_frontier(config);
  std::map<double, std::size_t> smallest;
  for (const auto& r : rows) {
    if (r.fail_rate < 1.0 / 3.0 && !smallest.contains(r.eps)) smallest[r.eps] = r.m;
  }
  const double secs = clock.seconds();
  if (!smallest.contains(0.1) || !smallest.contains(0.3)) {
    return {false, "no grid point reached fail_rate < 1/3"};
  }
  const double ratio = static_cast<double>(smallest[0.1]) / static_cast<double>(smallest[0.3]);
  return {ratio >= 4.0 && secs < 600.0,
          fmt("m*(0.1)=%zu m*(0.3)=%zu ratio=%.2f (>= 4), runtime=%.2fs (< 600s)", smallest[0.1], smallest[0.3],
              ratio, secs)};
}

Outcome regression_certificate() {
  constexpr std::size_t n = 1000, d = 3, m = 60, trials = 1000;
  constexpr double eps = 0.3;
  std::size_t certified = 0, violations = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto seeds = trial_seeds(404, t);
    const auto inst = random_regression_instance(n, d, seeds.instance);
    const auto pi = sample_gaussian_sketch({n, m, SketchKind::kGaussian, 0, seeds.sketch});
    const auto trial = certified_trial(inst, pi, eps);
    if (!trial.embedding.pass) continue;
    ++certified;
    worst_gap = std::max(worst_gap, trial.ratio - certificate_bound(eps));
    if (!(trial.ratio <= certificate_bound(eps) + 1e-8)) ++violations;
  }
  return {violations == 0 && certified > 0,
          fmt("certified trials=%zu/1000, violations=%zu (need 0), max ratio - bound=%.4f", certified, violations,
              worst_gap)};
}

Outcome inner_products() {
  const std::vector<double> deltas{0.1, 0.25, 0.5, 0.75, 0.9};
  constexpr std::size_t samples = 100000, k = 6;
  std::vector<std::pair<std::string, std::function<Vector(Rng&)>>> dists{
      {"sphere",
       [](Rng& rng) {
         Vector v = gaussian(k, 1, rng).col(0);
         return Vector(v / v.norm());
       }},
      {"signed-axis",
       [](Rng& rng) {
         Vector v = Vector::Zero(k);
         v(static_cast<Eigen::Index>(rng.below(k))) = rng.below(2) ? 1.0 : -1.0;
         return v;
       }},
      {"two-point-line",
       [](Rng& rng) {
         Vector v = Vector::Zero(k);
         v(0) = rng.below(2) ? 0.6 : -0.8;
         return v;
       }},
      {"sparse-column-rest",
       [](Rng& rng) {
         const SketchSpec spec{1000000, 30, SketchKind::kSparse, 4, 12};
         const auto col = sparse_sketch_column(spec, static_cast<std::size_t>(rng.below(spec.n)));
         DenseMatrix dense = DenseMatrix::Zero(30, 1);
         for (std::size_t i = 0; i < col.rows.size(); ++i) dense(col.rows[i], 0) = col.values[i];
         return max_coordinate_profile(dense).front().rest;
       }},
  };
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    Rng rng(derive_seed(55, i));
    std::vector<VectorPair> pairs(samples);
    for (auto& pr : pairs) {
      pr.u = dists[i].second(rng);
      pr.v = dists[i].second(rng);
    }
    const auto r = inner_product_lemma_check(pairs, deltas);
    pass = pass && !r.any_flag();
    detail += dists[i].first + (r.any_flag() ? "=FLAG " : "=ok ");
  }

  constexpr double delta = 0.5;
  Rng rng(56);
  std::vector<double> xs(samples);
  for (auto& x : xs) x = rng.uniform() < 1.0 / (1.0 + delta) ? -delta : 1.0;
  const double fixture_delta[] = {delta};
  const auto r = inner_product_statistics(xs, fixture_delta);
  // Standard error of the empirical tail itself.
  const double observed = r.tails[0].empirical;
  const double se = std::sqrt(observed * (1.0 - observed) / samples);
  const double z = std::abs(observed - 1.0 / (1.0 + delta)) / se;
  pass = pass && !r.any_flag() && z <= 4.0;
  detail += fmt("tight-two-point=%s tail=%.5f target=%.5f z=%.3f (<= 4)", r.any_flag() ? "FLAG" : "ok", observed,
                1.0 / (1.0 + delta), z);
  return {pass, detail};
}

Outcome determinism() {
  std::vector<ExperimentConfig> configs;
  {
    auto c = default_config(SweepKind::kDimFrontier);
    c.n = {1000};
    c.m = {25, 100, 400, 1000};
    c.trials = 200;
    configs.push_back(c);
    c.explicit_gaussian = true;
    c.m = {25, 100};
    configs.push_back(c);
  }
  {
    auto c = default_config(SweepKind::kSparsityPhase);
    c.d = {8};
    c.m = {4, 40, 400};
    c.trials = 200;
    configs.push_back(c);
  }
  {
    auto c = default_config(SweepKind::kSparsityEps);
    c.d = {8};
    c.m = {100};
    c.trials = 200;
    configs.push_back(c);
  }
  {
    auto c = default_config(SweepKind::kRegressDemo);
    c.n = {2000};
    c.d = {3};
    c.eps = {0.5};
    c.trials = 200;
    configs.push_back(c);
  }
  {
    auto c = default_config(SweepKind::kLemmaSuite);
    c.trials = 200;
    configs.push_back(c);
  }
  std::size_t differing = 0;
  std::string detail;
  for (auto c : configs) {
    c.threads = 1;
    const auto serial = to_csv(run_sweep(c));
    const auto again = to_csv(run_sweep(c));
    c.threads = 4;
    const auto parallel = to_csv(run_sweep(c));
    const bool same = serial == again && serial == parallel;
    differing += same ? 0 : 1;
    detail += to_string(c.kind) + (same ? "=identical " : "=DIFFERENT ");
  }
  return {differing == 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"interlacing", interlacing},
      {"projection-norm", projection_norm},
      {"collision-statistics", collisions},
      {"alias-method", alias},
      {"s1-phase-transition", phase_transition},
      {"dimension-frontier", dim_frontier},
      {"regression-certificate", regression_certificate},
      {"inner-product-lemmas", inner_products},
      {"determinism", determinism},
  };

  CLI::App app{"acceptance checks"};
  std::vector<std::string> selected;
  bool list = false;
  app.add_option("--criterion", selected, "run only these criteria (repeatable)");
  app.add_flag("--list", list, "print criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& [name, _] : criteria) std::cout << name << '\n';
    return 0;
  }
  for (const auto& name : selected) {
    const bool known = std::any_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == name; });
    if (!known) {
      std::cerr << "unknown criterion: " << name << '\n';
      return 1;
    }
  }

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
    Outcome outcome{false, ""};
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << name << ": " << outcome.detail << std::endl;
    failed += outcome.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
