#include "ose/sweeps.hpp"

#include "ose/embedding.hpp"
#include "ose/errors.hpp"
#include "ose/instances.hpp"
#include "ose/linalg.hpp"
#include "ose/random.hpp"
#include "ose/sketch.hpp"
#include "ose/sparsity.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>

namespace ose {

bool LemmaSuiteResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const LemmaVerdict& v) { return v.pass; });
}

void print_lemma_summary(std::ostream& out, const LemmaSuiteResult& result) {
  for (const auto& v : result.verdicts) {
    out << v.lemma << "  " << v.statistic_name << "=" << format_double(v.statistic) << "  bound="
        << format_double(v.bound) << "  violations=" << v.violations << "/" << v.checks << "  "
        << (v.pass ? "PASS" : "FAIL") << '\n';
  }
  out << (result.all_pass() ? "lemma-suite: all checks passed" : "lemma-suite: VIOLATION") << '\n';
}

namespace {

constexpr double kZLimit = 4.0;

struct Context {
  std::size_t n = 0, d = 0, m = 0, s = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

class SuiteBuilder {
 public:
  explicit SuiteBuilder(LemmaSuiteResult& result) : result_(result) {}

  void add(const Context& ctx, std::string lemma, std::string statistic_name, double statistic, double bound,
           std::size_t checks, std::size_t violations) {
    LemmaVerdict v;
    v.lemma = std::move(lemma);
    v.statistic_name = std::move(statistic_name);
    v.statistic = statistic;
    v.bound = bound;
    v.checks = checks;
    v.violations = violations;
    v.pass = violations == 0;

    const auto estimate = wilson_estimate(violations, checks);
    TrialRecord r;
    r.sweep = to_string(SweepKind::kLemmaSuite);
    r.n = ctx.n;
    r.d = ctx.d;
    r.m = ctx.m;
    r.s = ctx.s;
    r.eps = ctx.eps;
    r.trials = checks;
    r.failures = violations;
    r.fail_rate = estimate.rate;
    r.ci_low = estimate.ci_low;
    r.ci_high = estimate.ci_high;
    r.aux_name = v.lemma + ":" + v.statistic_name;
    r.aux_value = statistic;
    r.seed = ctx.seed;
    r.validate();

    result_.records.push_back(std::move(r));
    result_.verdicts.push_back(std::move(v));
  }

  // Single check: violated when statistic exceeds bound.
  void at_most(const Context& ctx, std::string lemma, std::string name, double statistic, double bound) {
    add(ctx, std::move(lemma), std::move(name), statistic, bound, 1, statistic <= bound ? 0 : 1);
  }

  void at_least(const Context& ctx, std::string lemma, std::string name, double statistic, double bound) {
    add(ctx, std::move(lemma), std::move(name), statistic, bound, 1, statistic >= bound ? 0 : 1);
  }

 private:
  LemmaSuiteResult& result_;
};

struct MeanStats {
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
};

MeanStats mean_stats(const std::vector<double>& xs) {
  MeanStats out;
  const auto n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.variance = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  out.standard_error = std::sqrt(out.variance / n);
  return out;
}

// |mean - target| in standard errors; 0 when both the deviation and the error vanish.
double z_score(double mean, double target, double standard_error) {
  const double dev = std::abs(mean - target);
  if (dev <= 1e-15 * std::max(1.0, std::abs(target))) return 0.0;
  return standard_error > 0.0 ? dev / standard_error : std::numeric_limits<double>::infinity();
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng);
  return a;
}

Vector unit_sphere(std::size_t k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector g(static_cast<Eigen::Index>(k));
  do {
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = normal(rng);
  } while (g.norm() == 0.0);
  return g / g.norm();
}

void interlacing_lemma(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  Rng rng(ctx.seed);
  const std::size_t cols = std::max<std::size_t>(ctx.d, 2);
  std::size_t violations = 0;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::size_t rows = 1 + t % (cols - 1);
    const DenseMatrix a = gaussian_matrix(rows, cols, rng);
    const DenseMatrix row = gaussian_matrix(cols, 1, rng);
    if (!interlacing_check(a, row.col(0)).interlaces) ++violations;
  }
  suite.add(ctx, "interlacing", "violations", static_cast<double>(violations), 0.0, config.trials, violations);
}

double projection_lemma(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  std::vector<double> diag(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) diag[i] = 0.5 + 0.25 * static_cast<double>(i % 5);
  const auto ex = projection_norm_experiment(ctx.n, ctx.m, diag, 10 * config.trials, ctx.seed, ctx.eps,
                                             config.threads);
  suite.at_most(ctx, "projection-norm", "mean_z", z_score(ex.mean, ex.predicted_center, ex.standard_error),
                kZLimit);
  suite.at_most(ctx, "projection-norm", "tail_fraction", ex.tail_fraction, 0.05);
  return ex.tail_fraction;
}

// Tail fractions at increasing m must not grow beyond sampling noise.
void projection_decay(SuiteBuilder& suite, const Context& ctx, const std::vector<double>& tails,
                      std::size_t draws) {
  std::size_t rises = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tails.size(); ++i) {
    const double p = std::max(tails[i - 1], 1.0 / static_cast<double>(draws));
    const double se = std::sqrt(2.0 * p * (1.0 - p) / static_cast<double>(draws));
    const double z = (tails[i] - tails[i - 1]) / se;
    worst = std::max(worst, z);
    if (z > kZLimit) ++rises;
  }
  suite.add(ctx, "projection-norm", "max_tail_rise_z", worst, kZLimit, tails.size() - 1, rises);
}

void frobenius_lemma(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  const double eps[] = {ctx.eps};
  const auto fc = frobenius_concentration_check(ctx.n, ctx.d, ctx.m, config.trials, ctx.seed, eps, config.threads);
  suite.at_most(ctx, "frobenius-concentration", "mean_z", z_score(fc.mean, fc.expected, fc.standard_error),
                kZLimit);
}

void record_inner_products(SuiteBuilder& suite, const Context& ctx, const std::string& tag,
                           const InnerProductReport& report) {
  const double mean_z = report.standard_error > 0.0 ? report.mean / report.standard_error : 0.0;
  suite.add(ctx, "nonnegative-dot-product:" + tag, "mean_z", mean_z, -kZLimit, 1, report.mean_flagged ? 1 : 0);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t flagged = 0;
  for (const auto& tail : report.tails) {
    const double z = tail.standard_error > 0.0 ? (tail.empirical - tail.bound) / tail.standard_error
                                               : (tail.empirical > tail.bound ? 1e300 : -1e300);
    worst = std::max(worst, z);
    if (tail.flagged) ++flagged;
  }
  suite.add(ctx, "not-negative-often:" + tag, "max_tail_z", worst, kZLimit, report.tails.size(), flagged);
}

void inner_product_lemmas(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  const std::vector<double> deltas{0.1, 0.25, 0.5, 0.75};
  const std::size_t samples = 10 * config.trials;
  constexpr std::size_t k = 8;

  const SketchSpec rest_spec{1'000'000, std::max<std::size_t>(ctx.m, 4), SketchKind::kSparse, 4, ctx.seed};
  const std::vector<std::pair<std::string, std::function<Vector(Rng&)>>> distributions{
      {"sphere", [](Rng& rng) { return unit_sphere(k, rng); }},
      {"signed-axis",
       [](Rng& rng) {
         Vector u = Vector::Zero(k);
         u(static_cast<Eigen::Index>(rng.below(k))) = rng.below(2) == 0 ? 1.0 : -1.0;
         return u;
       }},
      {"two-point-line",
       [](Rng& rng) {
         Vector u = Vector::Zero(k);
         u(0) = rng.below(2) == 0 ? 0.6 : -0.8;
         return u;
       }},
      {"shifted-ball",
       [](Rng& rng) {
         Vector u = 0.7 * std::pow(rng.uniform(), 1.0 / static_cast<double>(k)) * unit_sphere(k, rng);
         u(0) += 0.3;
         return u;
       }},
      {"sparse-column-rest",
       [&rest_spec](Rng& rng) {
         const auto column = sparse_sketch_column(rest_spec, static_cast<std::size_t>(rng.below(rest_spec.n)));
         DenseMatrix dense = DenseMatrix::Zero(static_cast<Eigen::Index>(rest_spec.m), 1);
         for (std::size_t i = 0; i < column.rows.size(); ++i) {
           dense(static_cast<Eigen::Index>(column.rows[i]), 0) = column.values[i];
         }
         return max_coordinate_profile(dense).front().rest;
       }},
  };

  for (std::size_t i = 0; i < distributions.size(); ++i) {
    Rng rng(derive_seed(ctx.seed, i));
    std::vector<VectorPair> pairs;
    pairs.reserve(samples);
    for (std::size_t t = 0; t < samples; ++t) {
      Vector u = distributions[i].second(rng);
      Vector v = distributions[i].second(rng);
      pairs.push_back({std::move(u), std::move(v)});
    }
    record_inner_products(suite, ctx, distributions[i].first, inner_product_lemma_check(pairs, deltas));
  }

  // Two-point law attaining the tail bound at delta0 with E X = 0.
  constexpr double delta0 = 0.5;
  Rng rng(derive_seed(ctx.seed, distributions.size()));
  std::vector<double> xs(samples);
  for (auto& x : xs) x = rng.uniform() < 1.0 / (1.0 + delta0) ? -delta0 : 1.0;
  record_inner_products(suite, ctx, "tight-two-point", inner_product_statistics(xs, deltas));
}

void collision_lemmas(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  ctx.n = std::max(ctx.n, 100 * ctx.d * ctx.d);
  ctx.s = 1;
  const SketchMatrix sketch =
      sample_sparse_sketch(SketchSpec{ctx.n, ctx.m, SketchKind::kSparse, 1, derive_seed(ctx.seed, 0)});
  const auto p = signed_row_fractions(sketch);

  std::vector<double> cs(config.trials);
  double expected = 0.0;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const auto coords = sample_basis_coordinates(ctx.n, ctx.d, derive_seed(ctx.seed, t + 1));
    const auto stats = collision_stats(max_coordinate_profile(sketch_columns(sketch, coords)), p);
    cs[t] = static_cast<double>(stats.collisions);
    expected = stats.expected_collisions;
  }
  const auto ms = mean_stats(cs);
  suite.at_most(ctx, "max-row-collisions", "mean_z", z_score(ms.mean, expected, ms.standard_error), kZLimit);
  if (expected >= 1.0) {
    suite.at_most(ctx, "max-row-collisions", "variance", ms.variance, 4.0 * std::pow(expected, 1.5));
  }
}

void uniform_balls_lemmas(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  {
    constexpr std::size_t d = 200, m = 100, t = 3;
    Context c{d, d, m, 0, ctx.eps, derive_seed(ctx.seed, 0)};
    std::vector<double> counts(config.trials);
    for (std::size_t r = 0; r < config.trials; ++r) {
      const auto loads = throw_balls(d, m, std::nullopt, derive_seed(c.seed, r));
      counts[r] = static_cast<double>(bins_with_load_at_least(loads, t));
    }
    const auto ms = mean_stats(counts);
    suite.at_most(c, "bin-load-count", "mean_z",
                  z_score(ms.mean, expected_bins_with_load_at_least(d, m, t), ms.standard_error), kZLimit);
  }
  {
    // alpha = 1/4, gamma = 1/16: load alpha / (2 gamma) = 2 in at least d^(3/4) / 2 bins.
    constexpr std::size_t d = 10'000, m = 10'000, t = 2;
    const double needed = std::pow(static_cast<double>(d), 0.75) / 2.0;
    Context c{d, d, m, 0, ctx.eps, derive_seed(ctx.seed, 1)};
    const std::size_t reps = std::min<std::size_t>(config.trials, 100);
    std::size_t short_reps = 0;
    double fewest = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < reps; ++r) {
      const auto loads = throw_balls(d, m, std::nullopt, derive_seed(c.seed, r));
      const auto bins = static_cast<double>(bins_with_load_at_least(loads, t));
      fewest = std::min(fewest, bins);
      if (bins < needed) ++short_reps;
    }
    suite.add(c, "uniform-balls-bins", "min_loaded_bins", fewest, needed, reps, short_reps);
  }
}

void nonuniform_balls_lemma(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  // alpha = 1/2, gamma = 1/16: virtual loads of alpha / (2 gamma) = 4 and
  // single-bin groups of at least 2, at least d^(1/2) / 2 of them.
  constexpr std::size_t d = 10'000, m = 10'000, t = 4;
  std::vector<double> p(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += p[i] = 1.0 / static_cast<double>(i + 1);
  for (auto& x : p) x /= total;

  const double needed = std::sqrt(static_cast<double>(d)) / 2.0;
  Context c{d, d, m, 0, ctx.eps, ctx.seed};
  const std::size_t reps = std::min<std::size_t>(config.trials, 100);
  std::size_t short_reps = 0;
  double fewest = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < reps; ++r) {
    const auto ex = virtual_group_extraction(d, p, t, derive_seed(ctx.seed, r));
    const auto groups = static_cast<double>(ex.groups.groups.size());
    fewest = std::min(fewest, groups);
    if (groups < needed) ++short_reps;
  }
  suite.add(c, "nonuniform-balls-bins", "min_groups", fewest, needed, reps, short_reps);
}

std::vector<double> random_distribution(std::size_t m, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& x : p) {
    // Sparse, heavy-tailed masses so that zero and dominant bins both occur.
    x = rng.below(4) == 0 ? 0.0 : std::pow(expo(rng), 3.0);
    total += x;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& x : p) x /= total;
  return p;
}

void alias_lemmas(SuiteBuilder& suite, const ExperimentConfig& config, Context ctx) {
  {
    Rng rng(derive_seed(ctx.seed, 0));
    constexpr std::size_t vectors = 100;
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t v = 0; v < vectors; ++v) {
      const std::size_t m = 1 + rng.below(v % 10 == 0 ? 10'000 : 500);
      const auto p = random_distribution(m, rng);
      const auto table = alias_virtual_bins(p);
      const auto masses = table.attributed_masses();
      double err = 0.0;
      for (std::size_t i = 0; i < m; ++i) err = std::max(err, std::abs(masses[i] - p[i]));
      bool shape_ok = table.size() == m;
      for (const auto& bin : table.bins()) {
        err = std::max(err, std::abs(bin.mass() - 1.0 / static_cast<double>(m)));
        shape_ok = shape_ok && bin.count >= 1 && bin.count <= 2;
      }
      worst = std::max(worst, err);
      if (err > 1e-12 || !shape_ok) ++bad;
    }
    Context c = ctx;
    c.seed = derive_seed(ctx.seed, 0);
    suite.add(c, "alias-virtual-bins", "max_mass_error", worst, 1e-12, vectors, bad);
  }
  {
    constexpr std::size_t m = 50;
    Rng rng(derive_seed(ctx.seed, 1));
    const auto p = random_distribution(m, rng);
    const auto table = alias_virtual_bins(p);
    const std::size_t draws = 100 * config.trials;
    std::vector<double> counts(m, 0.0);
    for (std::size_t i = 0; i < draws; ++i) counts[table.sample(rng).second] += 1.0;

    // Pool bins with expected count below 5 into one cell.
    double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double expected = p[i] * static_cast<double>(draws);
      if (expected < 5.0) {
        pooled_obs += counts[i];
        pooled_exp += expected;
        continue;
      }
      stat += (counts[i] - expected) * (counts[i] - expected) / expected;
      ++cells;
    }
    if (pooled_exp > 0.0) {
      stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
      ++cells;
    }
    double p_value = 1.0;
    if (cells >= 2) {
      p_value = boost::math::cdf(boost::math::complement(
          boost::math::chi_squared_distribution<double>(static_cast<double>(cells - 1)), stat));
    }
    Context c = ctx;
    c.m = m;
    c.seed = derive_seed(ctx.seed, 1);
    suite.at_least(c, "alias-sampling", "chi_square_p", p_value, 0.001);
  }
}

}  // namespace

LemmaSuiteResult run_lemma_suite(const ExperimentConfig& config) {
  config.validate();
  if (config.n.empty() || config.d.empty() || config.m.empty() || config.eps.empty()) {
    throw InputError("lemma-suite needs non-empty n, d, m and eps grids");
  }
  if (config.trials < 2) throw InputError("lemma-suite needs at least 2 trials");

  LemmaSuiteResult result;
  SuiteBuilder suite(result);
  const std::size_t n = config.n.front();
  const std::size_t d = config.d.front();
  const double eps = config.eps.front();
  std::uint64_t lemma = 0;
  auto context = [&](std::size_t m) {
    return Context{n, d, m, 0, eps, derive_seed(config.master_seed, lemma)};
  };

  interlacing_lemma(suite, config, context(config.m.front()));
  ++lemma;
  std::vector<std::size_t> ms = config.m;
  std::sort(ms.begin(), ms.end());
  std::vector<double> tails;
  for (auto m : ms) {
    if (m > n) throw InputError("lemma-suite: m exceeds n");
    tails.push_back(projection_lemma(suite, config, context(m)));
    ++lemma;
  }
  if (tails.size() > 1) projection_decay(suite, context(ms.back()), tails, 10 * config.trials);
  for (auto m : ms) {
    if (d < 2) break;
    frobenius_lemma(suite, config, context(m));
    ++lemma;
  }
  inner_product_lemmas(suite, config, context(config.m.front()));
  ++lemma;
  collision_lemmas(suite, config, context(config.m.front()));
  ++lemma;
  uniform_balls_lemmas(suite, config, context(0));
  ++lemma;
  nonuniform_balls_lemma(suite, config, context(0));
  ++lemma;
  alias_lemmas(suite, config, context(0));
  return result;
}

}  // namespace ose
