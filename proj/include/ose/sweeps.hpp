#pragma once

#include "ose/csv.hpp"
#include "ose/experiment_config.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ose {

// Every sweep enumerates its cells in output order; cell i draws from
// derive_seed(master_seed, i) and trial t of that cell from trial_seeds(cell_seed, t).
// Cells run concurrently on config.threads workers and rows are emitted in
// cell order, so output is independent of scheduling.

/// Gaussian sketches against random-rotation instances over (n, d, eps, m).
/// Cells with m == n use the identity sketch. aux: median_kappa.
std::vector<TrialRecord> run_dim_frontier(const ExperimentConfig& config);

/// Sparse sketches against basis-column instances over (n, d, eps, s, m); n
/// defaults to 100 d^2 and combinations with s > m or m > n are skipped.
/// Five rows per cell, one per aux statistic: mean_C, stderr_C, expected_C,
/// mean_max_pair_stress_dev, mean_min_pair_stress_dev.
std::vector<TrialRecord> run_sparsity_phase(const ExperimentConfig& config);

/// Same cells as run_sparsity_phase, ordered by (n, d, m, s, eps).
std::vector<TrialRecord> run_sparsity_eps(const ExperimentConfig& config);

/// Exact versus sketched least squares over (n, d, eps, m); m defaults to
/// ceil(50 (d + 1) / eps^2). Per cell: summary rows (median_error_ratio,
/// certificate_bound, certificate_violations, sketch_failures) followed by
/// one error_ratio row per trial.
std::vector<TrialRecord> run_regress_demo(const ExperimentConfig& config);

struct LemmaVerdict {
  std::string lemma;
  std::string statistic_name;
  double statistic = 0.0;
  double bound = 0.0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  bool pass = true;
};

struct LemmaSuiteResult {
  std::vector<LemmaVerdict> verdicts;
  std::vector<TrialRecord> records;

  bool all_pass() const;
};

LemmaSuiteResult run_lemma_suite(const ExperimentConfig& config);

/// One line per lemma: name, statistic, bound, verdict.
void print_lemma_summary(std::ostream& out, const LemmaSuiteResult& result);

/// Dispatches on config.kind (lemma-suite returns its records).
std::vector<TrialRecord> run_sweep(const ExperimentConfig& config);

}  // namespace ose
