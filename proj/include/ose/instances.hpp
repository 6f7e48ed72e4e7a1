#pragma once

#include "ose/linalg.hpp"
#include "ose/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ose {

enum class InstanceFamily {
  kRandomRotation,  // o.n. basis of a uniformly random d-dimensional subspace
  kBasisColumns,    // d distinct standard basis vectors
};

std::string to_string(InstanceFamily family);
/// Accepts "random-rotation" and "basis-columns"; throws InputError otherwise.
InstanceFamily parse_instance_family(std::string_view tag);

/// An n x d orthonormal basis together with the family and seed it came from.
/// Basis-column instances are stored by their coordinates; basis() materializes them.
class SubspaceInstance {
 public:
  static SubspaceInstance from_basis(OrthonormalBasis basis, std::uint64_t seed);
  static SubspaceInstance from_coordinates(std::size_t n, std::vector<std::size_t> coordinates,
                                           std::uint64_t seed);

  InstanceFamily family() const noexcept { return family_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t ambient_dim() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  /// Selected coordinates (basis-columns family only; empty otherwise).
  std::span<const std::size_t> coordinates() const noexcept { return coordinates_; }

  OrthonormalBasis basis() const;

 private:
  SubspaceInstance() = default;

  InstanceFamily family_ = InstanceFamily::kRandomRotation;
  std::uint64_t seed_ = 0;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::optional<OrthonormalBasis> basis_;
  std::vector<std::size_t> coordinates_;
};

/// d i.i.d. Gaussian columns (one stream seeded by `seed`, filled column by
/// column), normalized, then Gram-Schmidt. On degeneracy the draw is repeated
/// from derive_seed(seed, attempt) up to 100 times.
SubspaceInstance sample_random_subspace(std::size_t n, std::size_t d, std::uint64_t seed);

struct BasisSamplingOptions {
  /// Permit n < 100 d^2. Outside that regime the duplicate rate exceeds 1%.
  bool allow_outside_regime = false;
  std::size_t max_attempts = 1000;
};

/// d i.i.d. uniform coordinates in [0, n), redrawn as a whole tuple until all
/// are distinct. Columns are +e_j.
SubspaceInstance sample_basis_subspace(std::size_t n, std::size_t d, std::uint64_t seed,
                                       const BasisSamplingOptions& options = {});

/// The coordinate tuple sample_basis_subspace would select, without building the instance.
std::vector<std::size_t> sample_basis_coordinates(std::size_t n, std::size_t d, std::uint64_t seed,
                                                  const BasisSamplingOptions& options = {});

/// One draw of |P_E D u|^2 with u uniform on S^{n-1} and E = span(e_1..e_m).
struct ProjectionTrial {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> d_diagonal;
  double observed = 0.0;
  double predicted_center = 0.0;  // sum_{i<m} D_ii^2 / n, the exact mean
  double deviation_scale = 0.0;   // sigma_max^2 m / n
};

ProjectionTrial projection_norm_trial(std::size_t n, std::size_t m, std::span<const double> d_diagonal,
                                      std::uint64_t seed);

struct ProjectionExperiment {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double predicted_center = 0.0;
  double deviation_scale = 0.0;
  double tail_epsilon = 0.0;
  double tail_fraction = 0.0;  // fraction with |observed - center| > tail_epsilon * deviation_scale
};

/// `trials` independent projection_norm_trial draws; trial t uses derive_seed(seed, t).
ProjectionExperiment projection_norm_experiment(std::size_t n, std::size_t m,
                                                std::span<const double> d_diagonal,
                                                std::size_t trials, std::uint64_t seed,
                                                double tail_epsilon, unsigned threads = 1);

struct TailFraction {
  double epsilon;
  double fraction;
};

struct FrobeniusConcentration {
  std::size_t n = 0, d = 0, m = 0, trials = 0;
  double expected = 0.0;  // (d - 1) m / n
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<TailFraction> tails;  // outside (1 +- eps) * expected
};

/// Squared Frobenius norm of the first m rows of the first d - 1 columns of a
/// random-rotation instance, over `trials` instances.
FrobeniusConcentration frobenius_concentration_check(std::size_t n, std::size_t d, std::size_t m,
                                                     std::size_t trials, std::uint64_t seed,
                                                     std::span<const double> epsilons,
                                                     unsigned threads = 1);

}  // namespace ose
