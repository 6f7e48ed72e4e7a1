#pragma once

#include "ose/embedding.hpp"
#include "ose/linalg.hpp"
#include "ose/sketch.hpp"

#include <cstdint>
#include <optional>

namespace ose {

/// min_x |A x - b| with A n x d, n >= d.
struct RegressionInstance {
  DenseMatrix a;
  Vector b;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SolveMethod { kExact, kSketched };

struct RegressionResult {
  Vector x;
  double residual_norm = 0.0;  // |A x - b| on the original instance
  SolveMethod method = SolveMethod::kExact;
  std::optional<SketchSpec> sketch_spec;
  std::uint64_t instance_seed = 0;
};

/// Gaussian A and b with N(0, 1) entries.
RegressionInstance random_regression_instance(std::size_t n, std::size_t d, std::uint64_t seed);

/// x* = V Sigma^{-1} U^T b from the thin SVD of A.
/// Throws DegeneracyError when sigma_min <= 1e-10 sigma_max.
RegressionResult exact_least_squares(const RegressionInstance& instance);

/// Solves min |Pi A x - Pi b| and reports the residual against the original (A, b).
/// Throws SketchFailure when Pi A is rank-deficient.
RegressionResult sketch_and_solve(const RegressionInstance& instance, const SketchMatrix& sketch);

/// Sketch-and-solve with a Gaussian sketch of m rows drawn through
/// gaussian_sketch_image, i.e. without materializing the m x n matrix.
RegressionResult gaussian_sketch_and_solve(const RegressionInstance& instance, std::size_t m, std::uint64_t seed);

/// sketched.residual_norm / exact.residual_norm; 1 when both are <= 1e-12.
/// Throws InputError when the results come from different instances.
double error_ratio(const RegressionResult& exact, const RegressionResult& sketched);

/// (1 + eps) / (1 - eps): the ratio guaranteed when the sketch embeds span(A, b).
double certificate_bound(double epsilon);

/// Orthonormal basis of span(A, b); throws DegeneracyError if b lies in span(A).
OrthonormalBasis augmented_basis(const RegressionInstance& instance);

/// One sketch-and-solve run checked against the embedding certificate: when
/// Pi embeds span(A, b) at epsilon the error ratio must not exceed
/// certificate_bound(epsilon) + 1e-8.
struct CertifiedTrial {
  RegressionResult exact;
  std::optional<RegressionResult> sketched;  // empty when Pi A lost rank
  EmbeddingReport embedding;                 // of Pi applied to augmented_basis(instance)
  double ratio = 0.0;                        // NaN when sketched is empty
  double bound = 0.0;
  bool violation = false;
};

CertifiedTrial certified_trial(const RegressionInstance& instance, const SketchMatrix& sketch, double epsilon);

/// Gaussian variant: Pi Q is drawn as an m x (d+1) N(0, 1/m) block for the
/// Gram-Schmidt basis Q of span(A, b), and Pi [A b] = (Pi Q) R with R = Q^T [A b].
CertifiedTrial certified_gaussian_trial(const RegressionInstance& instance, std::size_t m, std::uint64_t seed,
                                        double epsilon);

}  // namespace ose
