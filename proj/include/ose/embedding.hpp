#pragma once

#include "ose/instances.hpp"
#include "ose/linalg.hpp"
#include "ose/sketch.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ose {

/// Singular spectrum of Pi U and the two-sided distortion verdict at epsilon.
struct EmbeddingReport {
  SingularSpectrum spectrum;
  double sigma_min;
  double sigma_max;
  double kappa;
  double epsilon;
  bool pass;  // sigma_min >= 1 - epsilon and sigma_max <= 1 + epsilon
};

/// Spectrum of the sketched basis viewed as a map R^d -> R^m. When m < d the
/// d - m missing singular values are zero and are appended explicitly.
SingularSpectrum operator_spectrum(const DenseMatrix& sketched_basis);

/// Report for an already sketched basis Pi U.
EmbeddingReport embedding_report(const DenseMatrix& sketched_basis, double epsilon);

EmbeddingReport embedding_check(const SketchMatrix& sketch, const OrthonormalBasis& basis, double epsilon);
EmbeddingReport embedding_check(const SketchMatrix& sketch, const SubspaceInstance& instance, double epsilon);

/// Unit vectors with maximal norm ratio |Pi U z1| / |Pi U z2|: the top and
/// bottom right singular vectors. ratio is kappa(Pi U) and is infinite for
/// rank-deficient Pi U.
struct WitnessPair {
  Vector z1;
  Vector z2;
  double ratio;
};

WitnessPair witness_pair(const DenseMatrix& sketched_basis);
WitnessPair witness_pair(const SketchMatrix& sketch, const OrthonormalBasis& basis);

struct FailureEstimate {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // 95% Wilson interval
  double ci_high = 0.0;
  std::optional<double> delta_target;
};

/// failures / trials with the 95% Wilson score interval.
FailureEstimate wilson_estimate(std::size_t failures, std::size_t trials,
                                std::optional<double> delta_target = std::nullopt);

enum class GaussianPath {
  kExplicit,           // materialize Pi and multiply
  kRotationInvariant,  // draw Pi U directly as an m x d N(0, 1/m) matrix
};

struct FailureOptions {
  unsigned threads = 1;
  GaussianPath gaussian_path = GaussianPath::kExplicit;
  BasisSamplingOptions basis_sampling;
  std::optional<double> delta_target;
};

/// Seeds for trial t under a master seed: the sketch and the instance each get
/// their own child stream of derive_seed(master, t).
struct TrialSeeds {
  std::uint64_t trial;
  std::uint64_t sketch;
  std::uint64_t instance;
};
TrialSeeds trial_seeds(std::uint64_t master_seed, std::size_t trial);

/// Outcome of embedding_check on one freshly drawn (Pi, U) pair.
EmbeddingReport run_embedding_trial(const SketchSpec& spec, InstanceFamily family, std::size_t d,
                                    double epsilon, const TrialSeeds& seeds,
                                    const FailureOptions& options = {});

/// Monte Carlo estimate of Pr[Pi fails to embed U] with fresh (Pi, U) per trial.
/// spec.seed is ignored; trial seeds come from master_seed.
FailureEstimate failure_probability(const SketchSpec& spec, InstanceFamily family, std::size_t d,
                                    double epsilon, std::size_t trials, std::uint64_t master_seed,
                                    const FailureOptions& options = {});

/// Tag form; throws InputError on an unknown distribution tag.
FailureEstimate failure_probability(const SketchSpec& spec, std::string_view distribution_tag,
                                    std::size_t d, double epsilon, std::size_t trials,
                                    std::uint64_t master_seed, const FailureOptions& options = {});

}  // namespace ose
