#include "ose/sweeps.hpp"

#include "ose/embedding.hpp"
#include "ose/errors.hpp"
#include "ose/instances.hpp"
#include "ose/parallel.hpp"
#include "ose/random.hpp"
#include "ose/regression.hpp"
#include "ose/sketch.hpp"
#include "ose/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace ose {

namespace {

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

TrialRecord base_record(SweepKind kind, std::size_t n, std::size_t d, std::size_t m, std::size_t s, double eps,
                        const FailureEstimate& estimate, std::uint64_t seed) {
  TrialRecord r;
  r.sweep = to_string(kind);
  r.n = n;
  r.d = d;
  r.m = m;
  r.s = s;
  r.eps = eps;
  r.trials = estimate.trials;
  r.failures = estimate.failures;
  r.fail_rate = estimate.rate;
  r.ci_low = estimate.ci_low;
  r.ci_high = estimate.ci_high;
  r.seed = seed;
  return r;
}

TrialRecord with_aux(TrialRecord r, std::string name, double value) {
  r.aux_name = std::move(name);
  r.aux_value = value;
  return r;
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Runs cell(i, cell_seed) for each cell and concatenates the rows in cell order.
template <typename Cell, typename Fn>
std::vector<TrialRecord> run_cells(const ExperimentConfig& config, const std::vector<Cell>& cells, Fn&& fn) {
  std::vector<std::vector<TrialRecord>> rows(cells.size());
  parallel_for(cells.size(), config.threads, [&](std::size_t i) {
    rows[i] = fn(cells[i], derive_seed(config.master_seed, i));
  });
  std::vector<TrialRecord> out;
  for (auto& block : rows) {
    for (auto& r : block) {
      r.validate();
      out.push_back(std::move(r));
    }
  }
  return out;
}

struct FrontierCell {
  std::size_t n, d;
  double eps;
  std::size_t m;
};

}  // namespace

std::vector<TrialRecord> run_dim_frontier(const ExperimentConfig& config) {
  config.validate();
  std::vector<FrontierCell> cells;
  for (auto n : sorted_unique(config.n)) {
    for (auto d : sorted_unique(config.d)) {
      if (d > n) throw InputError("dim-frontier: d exceeds n");
      for (auto eps : sorted_unique(config.eps)) {
        for (auto m : sorted_unique(config.m)) {
          if (m > n) throw InputError("dim-frontier: m = " + std::to_string(m) + " exceeds n = " + std::to_string(n));
          cells.push_back({n, d, eps, m});
        }
      }
    }
  }

  FailureOptions options;
  options.gaussian_path = config.explicit_gaussian ? GaussianPath::kExplicit : GaussianPath::kRotationInvariant;

  return run_cells(config, cells, [&](const FrontierCell& c, std::uint64_t cell_seed) {
    const SketchSpec spec = c.m == c.n ? SketchSpec{c.n, c.n, SketchKind::kIdentity, 0, 0}
                                       : SketchSpec{c.n, c.m, SketchKind::kGaussian, 0, 0};
    std::size_t failures = 0;
    std::vector<double> kappas(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
      const auto report = run_embedding_trial(spec, InstanceFamily::kRandomRotation, c.d, c.eps,
                                              trial_seeds(cell_seed, t), options);
      if (!report.pass) ++failures;
      kappas[t] = report.kappa;
    }
    const auto estimate = wilson_estimate(failures, config.trials);
    return std::vector<TrialRecord>{
        with_aux(base_record(config.kind, c.n, c.d, c.m, 0, c.eps, estimate, cell_seed), "median_kappa",
                 median(kappas))};
  });
}

namespace {

struct SparsityCell {
  std::size_t n, d;
  double eps;
  std::size_t s, m;
};

std::vector<TrialRecord> sparsity_cell(const ExperimentConfig& config, const SparsityCell& c,
                                       std::uint64_t cell_seed) {
  BasisSamplingOptions sampling;
  sampling.allow_outside_regime = config.allow_small_n;

  std::size_t failures = 0;
  double sum_c = 0.0;
  double sum_c2 = 0.0;
  double sum_expected = 0.0;
  double sum_max_dev = 0.0;
  double sum_min_dev = 0.0;
  std::size_t trials_with_pairs = 0;

  for (std::size_t t = 0; t < config.trials; ++t) {
    const auto seeds = trial_seeds(cell_seed, t);
    const auto coords = sample_basis_coordinates(c.n, c.d, seeds.instance, sampling);
    const SketchMatrix sketch = sample_sparse_sketch(SketchSpec{c.n, c.m, SketchKind::kSparse, c.s, seeds.sketch});
    const DenseMatrix su = sketch_columns(sketch, coords);
    if (!embedding_report(su, c.eps).pass) ++failures;

    const auto profiles = max_coordinate_profile(su);
    const auto stats = collision_stats(profiles, signed_row_fractions(sketch));
    const auto cval = static_cast<double>(stats.collisions);
    sum_c += cval;
    sum_c2 += cval * cval;
    sum_expected += stats.expected_collisions;

    const auto pairs = extract_disjoint_pairs(stats);
    if (!pairs.empty()) {
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& pair : pairs) {
        const double dev = stress_vector_norm(su, pair).direct - 1.0;
        hi = std::max(hi, dev);
        lo = std::min(lo, dev);
      }
      sum_max_dev += hi;
      sum_min_dev += lo;
      ++trials_with_pairs;
    }
  }

  const double n = static_cast<double>(config.trials);
  const double mean_c = sum_c / n;
  const double var_c = config.trials > 1 ? std::max(0.0, (sum_c2 - n * mean_c * mean_c) / (n - 1.0)) : 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto paired = static_cast<double>(trials_with_pairs);

  const auto base = base_record(config.kind, c.n, c.d, c.m, c.s, c.eps, wilson_estimate(failures, config.trials),
                                cell_seed);
  return {with_aux(base, "mean_C", mean_c), with_aux(base, "stderr_C", std::sqrt(var_c / n)),
          with_aux(base, "expected_C", sum_expected / n),
          with_aux(base, "mean_max_pair_stress_dev", trials_with_pairs ? sum_max_dev / paired : nan),
          with_aux(base, "mean_min_pair_stress_dev", trials_with_pairs ? sum_min_dev / paired : nan)};
}

std::vector<SparsityCell> sparsity_cells(const ExperimentConfig& config) {
  std::vector<SparsityCell> cells;
  for (auto d : sorted_unique(config.d)) {
    std::vector<std::size_t> ns = config.n.empty() ? std::vector<std::size_t>{100 * d * d} : sorted_unique(config.n);
    for (auto n : ns) {
      if (d > n) throw InputError("sparsity sweep: d exceeds n");
      for (auto eps : sorted_unique(config.eps)) {
        for (auto s : sorted_unique(config.s)) {
          for (auto m : sorted_unique(config.m)) {
            if (s > m || m > n) continue;
            cells.push_back({n, d, eps, s, m});
          }
        }
      }
    }
  }
  return cells;
}

}  // namespace

std::vector<TrialRecord> run_sparsity_phase(const ExperimentConfig& config) {
  config.validate();
  auto cells = sparsity_cells(config);
  std::stable_sort(cells.begin(), cells.end(), [](const SparsityCell& a, const SparsityCell& b) {
    return std::tie(a.n, a.d, a.eps, a.s, a.m) < std::tie(b.n, b.d, b.eps, b.s, b.m);
  });
  return run_cells(config, cells,
                   [&](const SparsityCell& c, std::uint64_t seed) { return sparsity_cell(config, c, seed); });
}

std::vector<TrialRecord> run_sparsity_eps(const ExperimentConfig& config) {
  config.validate();
  auto cells = sparsity_cells(config);
  std::stable_sort(cells.begin(), cells.end(), [](const SparsityCell& a, const SparsityCell& b) {
    return std::tie(a.n, a.d, a.m, a.s, a.eps) < std::tie(b.n, b.d, b.m, b.s, b.eps);
  });
  return run_cells(config, cells,
                   [&](const SparsityCell& c, std::uint64_t seed) { return sparsity_cell(config, c, seed); });
}

namespace {

struct RegressCell {
  std::size_t n, d;
  double eps;
  std::size_t m;
};

}  // namespace

std::vector<TrialRecord> run_regress_demo(const ExperimentConfig& config) {
  config.validate();
  if (config.n.empty()) throw InputError("regress-demo needs a non-empty 'n' grid");
  std::vector<RegressCell> cells;
  for (auto n : sorted_unique(config.n)) {
    for (auto d : sorted_unique(config.d)) {
      if (d + 1 > n) throw InputError("regress-demo: need n > d");
      for (auto eps : sorted_unique(config.eps)) {
        std::vector<std::size_t> ms = config.m;
        if (ms.empty()) {
          ms = {static_cast<std::size_t>(std::ceil(50.0 * static_cast<double>(d + 1) / (eps * eps)))};
        }
        for (auto m : sorted_unique(ms)) {
          if (m > n) {
            throw InputError("regress-demo: m = " + std::to_string(m) + " exceeds n = " + std::to_string(n));
          }
          cells.push_back({n, d, eps, m});
        }
      }
    }
  }

  return run_cells(config, cells, [&](const RegressCell& c, std::uint64_t cell_seed) {
    std::vector<TrialRecord> per_trial;
    std::vector<double> ratios;
    std::size_t embedding_failures = 0;
    std::size_t violations = 0;
    std::size_t sketch_failures = 0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const auto seeds = trial_seeds(cell_seed, t);
      const auto instance = random_regression_instance(c.n, c.d, seeds.instance);
      const CertifiedTrial trial = [&] {
        if (c.m == c.n) return certified_trial(instance, identity_sketch(c.n), c.eps);
        if (config.explicit_gaussian) {
          return certified_trial(
              instance, sample_gaussian_sketch(SketchSpec{c.n, c.m, SketchKind::kGaussian, 0, seeds.sketch}), c.eps);
        }
        return certified_gaussian_trial(instance, c.m, seeds.sketch, c.eps);
      }();
      const bool failed = !trial.embedding.pass;
      embedding_failures += failed ? 1 : 0;
      violations += trial.violation ? 1 : 0;
      if (!trial.sketched) ++sketch_failures;
      if (!std::isnan(trial.ratio)) ratios.push_back(trial.ratio);
      per_trial.push_back(with_aux(
          base_record(config.kind, c.n, c.d, c.m, 0, c.eps, wilson_estimate(failed ? 1 : 0, 1), seeds.trial),
          "error_ratio", trial.ratio));
    }
    const auto summary = base_record(config.kind, c.n, c.d, c.m, 0, c.eps,
                                     wilson_estimate(embedding_failures, config.trials), cell_seed);
    std::vector<TrialRecord> rows{with_aux(summary, "median_error_ratio", median(ratios)),
                                  with_aux(summary, "certificate_bound", certificate_bound(c.eps)),
                                  with_aux(summary, "certificate_violations", static_cast<double>(violations)),
                                  with_aux(summary, "sketch_failures", static_cast<double>(sketch_failures))};
    rows.insert(rows.end(), per_trial.begin(), per_trial.end());
    return rows;
  });
}

std::vector<TrialRecord> run_sweep(const ExperimentConfig& config) {
  switch (config.kind) {
    case SweepKind::kDimFrontier: return run_dim_frontier(config);
    case SweepKind::kSparsityPhase: return run_sparsity_phase(config);
    case SweepKind::kSparsityEps: return run_sparsity_eps(config);
    case SweepKind::kRegressDemo: return run_regress_demo(config);
    case SweepKind::kLemmaSuite: return run_lemma_suite(config).records;
  }
  throw InputError("unknown sweep kind");
}

}  // namespace ose
