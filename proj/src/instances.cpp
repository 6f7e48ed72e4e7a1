#include "ose/instances.hpp"

#include "ose/errors.hpp"
#include "ose/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ose {

std::string to_string(InstanceFamily family) {
  switch (family) {
    case InstanceFamily::kRandomRotation: return "random-rotation";
    case InstanceFamily::kBasisColumns: return "basis-columns";
  }
  return "unknown";
}

InstanceFamily parse_instance_family(std::string_view tag) {
  if (tag == "random-rotation") return InstanceFamily::kRandomRotation;
  if (tag == "basis-columns") return InstanceFamily::kBasisColumns;
  throw InputError("unknown instance distribution tag '" + std::string(tag) + "'");
}

SubspaceInstance SubspaceInstance::from_basis(OrthonormalBasis basis, std::uint64_t seed) {
  SubspaceInstance out;
  out.family_ = InstanceFamily::kRandomRotation;
  out.seed_ = seed;
  out.n_ = static_cast<std::size_t>(basis.rows());
  out.d_ = static_cast<std::size_t>(basis.cols());
  out.basis_ = std::move(basis);
  return out;
}

SubspaceInstance SubspaceInstance::from_coordinates(std::size_t n, std::vector<std::size_t> coordinates,
                                                    std::uint64_t seed) {
  if (coordinates.empty() || coordinates.size() > n) {
    throw ShapeError("basis-column instance needs 1 <= d <= n");
  }
  std::vector<std::size_t> sorted = coordinates;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("basis-column coordinates must be distinct");
  }
  if (sorted.back() >= n) throw ShapeError("basis-column coordinate out of range");
  SubspaceInstance out;
  out.family_ = InstanceFamily::kBasisColumns;
  out.seed_ = seed;
  out.n_ = n;
  out.d_ = coordinates.size();
  out.coordinates_ = std::move(coordinates);
  return out;
}

OrthonormalBasis SubspaceInstance::basis() const {
  if (basis_) return *basis_;
  DenseMatrix u = DenseMatrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(d_));
  for (std::size_t c = 0; c < d_; ++c) {
    u(static_cast<Eigen::Index>(coordinates_[c]), static_cast<Eigen::Index>(c)) = 1.0;
  }
  return OrthonormalBasis(std::move(u));
}

namespace {

constexpr int kMaxRotationAttempts = 100;

void fill_normal(DenseMatrix& g, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  }
}

}  // namespace

SubspaceInstance sample_random_subspace(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d < 1 || d > n) throw ShapeError("sample_random_subspace: need 1 <= d <= n");
  DenseMatrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (int attempt = 0; attempt < kMaxRotationAttempts; ++attempt) {
    fill_normal(g, attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double norm = g.col(j).norm();
      if (norm > 0.0) g.col(j) /= norm;
    }
    try {
      return SubspaceInstance::from_basis(gram_schmidt(g), seed);
    } catch (const DegeneracyError&) {
    }
  }
  throw DegeneracyError("sample_random_subspace: repeated degenerate draws");
}

std::vector<std::size_t> sample_basis_coordinates(std::size_t n, std::size_t d, std::uint64_t seed,
                                                  const BasisSamplingOptions& options) {
  if (d < 1 || d > n) throw ShapeError("sample_basis_subspace: need 1 <= d <= n");
  if (n < 100 * d * d && !options.allow_outside_regime) {
    throw InputError("sample_basis_subspace: n = " + std::to_string(n) + " is below 100 d^2 = " +
                     std::to_string(100 * d * d) + "; set allow_outside_regime to override");
  }
  Rng rng(seed);
  std::vector<std::size_t> coords(d);
  std::vector<std::size_t> sorted(d);
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    for (auto& c : coords) c = static_cast<std::size_t>(rng.below(n));
    sorted = coords;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) return coords;
  }
  throw DegeneracyError("sample_basis_subspace: no distinct tuple after " +
                        std::to_string(options.max_attempts) + " attempts");
}

SubspaceInstance sample_basis_subspace(std::size_t n, std::size_t d, std::uint64_t seed,
                                       const BasisSamplingOptions& options) {
  return SubspaceInstance::from_coordinates(n, sample_basis_coordinates(n, d, seed, options), seed);
}

namespace {

struct ProjectionSetup {
  double center;
  double scale;
};

ProjectionSetup validate_projection(std::size_t n, std::size_t m, std::span<const double> diag) {
  if (m < 1 || m > n) throw ShapeError("projection_norm_trial: need 1 <= m <= n");
  if (diag.size() != n) throw ShapeError("projection_norm_trial: diagonal must have length n");
  double head = 0.0;
  double max_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(diag[i])) throw InputError("projection_norm_trial: non-finite diagonal");
    const double sq = diag[i] * diag[i];
    if (i < m) head += sq;
    max_sq = std::max(max_sq, sq);
  }
  const double ratio = static_cast<double>(m) / static_cast<double>(n);
  // sigma~^2 = head / m, so the center sigma~^2 m / n is head / n.
  return {head / static_cast<double>(n), max_sq * ratio};
}

double draw_projection(std::size_t m, std::span<const double> diag, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double head = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double g = normal(rng);
    total += g * g;
    if (i < m) {
      const double x = diag[i] * g;
      head += x * x;
    }
  }
  return head / total;
}

}  // namespace

ProjectionTrial projection_norm_trial(std::size_t n, std::size_t m, std::span<const double> d_diagonal,
                                      std::uint64_t seed) {
  const auto setup = validate_projection(n, m, d_diagonal);
  ProjectionTrial trial;
  trial.n = n;
  trial.m = m;
  trial.d_diagonal.assign(d_diagonal.begin(), d_diagonal.end());
  trial.observed = draw_projection(m, d_diagonal, seed);
  trial.predicted_center = setup.center;
  trial.deviation_scale = setup.scale;
  return trial;
}

namespace {

struct MeanAndError {
  double mean;
  double standard_error;
};

MeanAndError summarize(const std::vector<double>& xs) {
  const auto count = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / count;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (count - 1.0) : 0.0;
  return {mean, std::sqrt(var / count)};
}

}  // namespace

ProjectionExperiment projection_norm_experiment(std::size_t n, std::size_t m,
                                                std::span<const double> d_diagonal,
                                                std::size_t trials, std::uint64_t seed,
                                                double tail_epsilon, unsigned threads) {
  if (trials < 1) throw InputError("projection_norm_experiment: trials must be positive");
  const auto setup = validate_projection(n, m, d_diagonal);
  std::vector<double> observed(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    observed[t] = draw_projection(m, d_diagonal, derive_seed(seed, t));
  });

  ProjectionExperiment out;
  out.n = n;
  out.m = m;
  out.trials = trials;
  const auto stats = summarize(observed);
  out.mean = stats.mean;
  out.standard_error = stats.standard_error;
  out.predicted_center = setup.center;
  out.deviation_scale = setup.scale;
  out.tail_epsilon = tail_epsilon;
  std::size_t outside = 0;
  for (double x : observed) {
    if (std::abs(x - setup.center) > tail_epsilon * setup.scale) ++outside;
  }
  out.tail_fraction = static_cast<double>(outside) / static_cast<double>(trials);
  return out;
}

FrobeniusConcentration frobenius_concentration_check(std::size_t n, std::size_t d, std::size_t m,
                                                     std::size_t trials, std::uint64_t seed,
                                                     std::span<const double> epsilons,
                                                     unsigned threads) {
  if (d < 1 || d > m || m > n) throw ShapeError("frobenius_concentration_check: need d <= m <= n");
  if (trials < 1) throw InputError("frobenius_concentration_check: trials must be positive");

  std::vector<double> stat(trials, 0.0);
  if (d > 1) {
    parallel_for(trials, threads, [&](std::size_t t) {
      const auto u = sample_random_subspace(n, d, derive_seed(seed, t)).basis();
      stat[t] = u.matrix().topLeftCorner(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d - 1))
                    .squaredNorm();
    });
  }

  FrobeniusConcentration out;
  out.n = n;
  out.d = d;
  out.m = m;
  out.trials = trials;
  out.expected = static_cast<double>(d - 1) * static_cast<double>(m) / static_cast<double>(n);
  const auto stats = summarize(stat);
  out.mean = stats.mean;
  out.standard_error = stats.standard_error;
  for (double eps : epsilons) {
    std::size_t outside = 0;
    for (double x : stat) {
      if (x < (1.0 - eps) * out.expected || x > (1.0 + eps) * out.expected) ++outside;
    }
    // d = 1 has a zero statistic and a zero band; nothing lies outside it.
    if (d == 1) outside = 0;
    out.tails.push_back({eps, static_cast<double>(outside) / static_cast<double>(trials)});
  }
  return out;
}

}  // namespace ose
