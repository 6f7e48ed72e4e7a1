#include "ose/embedding.hpp"

#include "ose/errors.hpp"
#include "ose/parallel.hpp"
#include "ose/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ose {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
}

}  // namespace

SingularSpectrum operator_spectrum(const DenseMatrix& sketched_basis) {
  SingularSpectrum core = singular_values(sketched_basis);
  if (sketched_basis.rows() >= sketched_basis.cols()) return core;
  std::vector<double> values(core.values().begin(), core.values().end());
  values.resize(static_cast<std::size_t>(sketched_basis.cols()), 0.0);
  return SingularSpectrum(std::move(values));
}

EmbeddingReport embedding_report(const DenseMatrix& sketched_basis, double epsilon) {
  check_epsilon(epsilon);
  SingularSpectrum spectrum = operator_spectrum(sketched_basis);
  const double lo = spectrum.smallest();
  const double hi = spectrum.largest();
  const double kappa = condition_number(spectrum);
  const bool pass = lo >= 1.0 - epsilon && hi <= 1.0 + epsilon;
  return EmbeddingReport{std::move(spectrum), lo, hi, kappa, epsilon, pass};
}

EmbeddingReport embedding_check(const SketchMatrix& sketch, const OrthonormalBasis& basis, double epsilon) {
  check_epsilon(epsilon);
  return embedding_report(apply_sketch(sketch, basis.matrix()), epsilon);
}

EmbeddingReport embedding_check(const SketchMatrix& sketch, const SubspaceInstance& instance, double epsilon) {
  check_epsilon(epsilon);
  if (instance.ambient_dim() != sketch.cols()) throw ShapeError("embedding_check: dimension mismatch");
  if (instance.family() == InstanceFamily::kBasisColumns) {
    return embedding_report(sketch_columns(sketch, instance.coordinates()), epsilon);
  }
  return embedding_check(sketch, instance.basis(), epsilon);
}

WitnessPair witness_pair(const DenseMatrix& sketched_basis) {
  if (sketched_basis.size() == 0) throw ShapeError("witness_pair: empty matrix");
  if (!sketched_basis.allFinite()) throw InputError("witness_pair: non-finite entries");
  if (sketched_basis.isZero(0.0)) throw DegeneracyError("witness_pair: Pi U is the zero matrix");
  Eigen::JacobiSVD<DenseMatrix> svd(sketched_basis, Eigen::ComputeFullV);
  const DenseMatrix& v = svd.matrixV();
  const Eigen::Index d = v.cols();
  return WitnessPair{v.col(0), v.col(d - 1), condition_number(operator_spectrum(sketched_basis))};
}

WitnessPair witness_pair(const SketchMatrix& sketch, const OrthonormalBasis& basis) {
  return witness_pair(apply_sketch(sketch, basis.matrix()));
}

FailureEstimate wilson_estimate(std::size_t failures, std::size_t trials, std::optional<double> delta_target) {
  if (trials == 0) throw InputError("wilson_estimate: trials must be positive");
  if (failures > trials) throw InputError("wilson_estimate: failures exceed trials");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
  FailureEstimate out;
  out.trials = trials;
  out.failures = failures;
  out.rate = p;
  out.ci_low = std::clamp(std::min(center - half, p), 0.0, 1.0);
  out.ci_high = std::clamp(std::max(center + half, p), 0.0, 1.0);
  if (failures == 0) out.ci_low = 0.0;
  if (failures == trials) out.ci_high = 1.0;
  out.delta_target = delta_target;
  return out;
}

TrialSeeds trial_seeds(std::uint64_t master_seed, std::size_t trial) {
  const std::uint64_t t = derive_seed(master_seed, trial);
  return TrialSeeds{t, derive_seed(t, 0), derive_seed(t, 1)};
}

EmbeddingReport run_embedding_trial(const SketchSpec& spec, InstanceFamily family, std::size_t d,
                                    double epsilon, const TrialSeeds& seeds, const FailureOptions& options) {
  SketchSpec trial_spec = spec;
  trial_spec.seed = seeds.sketch;

  if (family == InstanceFamily::kBasisColumns) {
    const auto coords = sample_basis_coordinates(spec.n, d, seeds.instance, options.basis_sampling);
    return embedding_report(sample_sketch_columns(trial_spec, coords), epsilon);
  }

  if (spec.kind == SketchKind::kGaussian && options.gaussian_path == GaussianPath::kRotationInvariant) {
    if (d > spec.n) throw ShapeError("run_embedding_trial: d exceeds n");
    return embedding_report(gaussian_sketched_orthonormal(spec.m, d, seeds.sketch), epsilon);
  }

  const auto instance = sample_random_subspace(spec.n, d, seeds.instance);
  const SketchMatrix sketch = [&] {
    switch (spec.kind) {
      case SketchKind::kGaussian: return sample_gaussian_sketch(trial_spec);
      case SketchKind::kSparse: return sample_sparse_sketch(trial_spec);
      case SketchKind::kIdentity: return identity_sketch(spec.n);
    }
    throw SpecError("unknown sketch kind");
  }();
  return embedding_check(sketch, instance, epsilon);
}

FailureEstimate failure_probability(const SketchSpec& spec, InstanceFamily family, std::size_t d,
                                    double epsilon, std::size_t trials, std::uint64_t master_seed,
                                    const FailureOptions& options) {
  if (trials < 1) throw InputError("failure_probability: trials must be positive");
  check_epsilon(epsilon);
  spec.validate();
  if (d < 1 || d > spec.n) throw ShapeError("failure_probability: need 1 <= d <= n");

  std::vector<unsigned char> failed(trials, 0);
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const auto report = run_embedding_trial(spec, family, d, epsilon, trial_seeds(master_seed, t), options);
    failed[t] = report.pass ? 0 : 1;
  });
  std::size_t failures = 0;
  for (auto f : failed) failures += f;
  return wilson_estimate(failures, trials, options.delta_target);
}

FailureEstimate failure_probability(const SketchSpec& spec, std::string_view distribution_tag,
                                    std::size_t d, double epsilon, std::size_t trials,
                                    std::uint64_t master_seed, const FailureOptions& options) {
  return failure_probability(spec, parse_instance_family(distribution_tag), d, epsilon, trials,
                             master_seed, options);
}

}  // namespace ose
