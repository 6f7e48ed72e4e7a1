#pragma once

#include "ose/linalg.hpp"
#include "ose/random.hpp"
#include "ose/sketch.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ose {

// ---------------------------------------------------------------------------
// Max-coordinate profiles and signed row classes
// ---------------------------------------------------------------------------

/// Column i of Pi U split at its coordinate of maximum absolute value.
struct ColumnProfile {
  std::size_t column = 0;
  std::size_t row = 0;  // 0-based; ties go to the lowest row
  double value = 0.0;   // signed entry at `row`
  Vector rest;          // the column with `row` removed, length m - 1
};

/// Signed row class of a (row, value) pair: 2 row for positive, 2 row + 1 for negative.
constexpr std::size_t signed_class(std::size_t row, double value) noexcept {
  return 2 * row + (value < 0.0 ? 1 : 0);
}

/// Throws DegeneracyError on a zero column.
std::vector<ColumnProfile> max_coordinate_profile(const DenseMatrix& sketched);

/// Fractions p_1..p_{2m} of the n columns of Pi whose max-|.| entry lies in
/// each signed row class.
std::vector<double> signed_row_fractions(const SketchMatrix& sketch);

struct CollisionStats {
  std::size_t d = 0;
  std::vector<std::size_t> class_sizes;            // 2m counts, summing to d
  std::vector<std::vector<std::size_t>> members;   // column indices per class, ascending
  std::uint64_t collisions = 0;                    // C = sum_k class_sizes[k] choose 2
  std::vector<double> p;                           // 2m class fractions of the full sketch
  double expected_collisions = 0.0;                // d (d - 1) / 2 * sum p_k^2
};

/// p must have 2m entries (m = profile length) summing to 1.
CollisionStats collision_stats(std::span<const ColumnProfile> profiles, std::span<const double> p);

using ColumnPair = std::pair<std::size_t, std::size_t>;

/// Greedy within-class pairing: floor(d_k / 2) disjoint pairs from each class.
std::vector<ColumnPair> extract_disjoint_pairs(const CollisionStats& stats);

struct Group {
  std::size_t label = 0;  // signed row class, or real bin for ball groups
  std::vector<std::size_t> members;
};

struct GroupSet {
  std::size_t group_size = 0;
  std::vector<Group> groups;
};

/// floor(d_k / t) disjoint groups of exactly t members from each class; t >= 2.
GroupSet extract_groups(const CollisionStats& stats, std::size_t t);

// ---------------------------------------------------------------------------
// Stress vectors and inner-product lemmas
// ---------------------------------------------------------------------------

/// |Pi U x|^2 for x = (1/sqrt t) sum_{i in G} e_i, computed directly and via
/// mean_i |u_i|^2 + (2/t) sum_{i<j} <u_i, u_j>.
struct StressNorm {
  double direct = 0.0;
  double expansion = 0.0;
};

StressNorm stress_vector_norm(const DenseMatrix& sketched, std::span<const std::size_t> group);
StressNorm stress_vector_norm(const DenseMatrix& sketched, const ColumnPair& pair);

struct VectorPair {
  Vector u;
  Vector v;
};

struct TailCheck {
  double delta = 0.0;
  double empirical = 0.0;       // fraction with <u, v> <= -delta
  double bound = 0.0;           // 1 / (1 + delta)
  double standard_error = 0.0;  // binomial standard error at the bound
  bool flagged = false;         // empirical > bound + 4 standard errors
};

struct InnerProductReport {
  std::size_t samples = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  bool mean_flagged = false;  // mean < -4 standard errors
  std::vector<TailCheck> tails;

  bool any_flag() const;
};

/// Empirical check of E<u, v> >= 0 and Pr(<u, v> <= -delta) <= 1/(1 + delta)
/// over i.i.d. pairs of vectors with norm at most 1 (InputError otherwise).
InnerProductReport inner_product_lemma_check(std::span<const VectorPair> samples,
                                             std::span<const double> deltas);

/// Same statistics for scalar samples of X with |X| <= 1 and E X >= 0.
InnerProductReport inner_product_statistics(std::span<const double> samples,
                                            std::span<const double> deltas);

// ---------------------------------------------------------------------------
// Balls and bins
// ---------------------------------------------------------------------------

/// Bin of each of d balls. Uniform over m bins when p is absent, otherwise
/// bin i with probability p[i] (p must have m nonnegative entries summing to 1).
std::vector<std::size_t> assign_balls(std::size_t d, std::size_t m, std::optional<std::span<const double>> p,
                                      std::uint64_t seed);

/// Multinomial bin loads, summing to d.
std::vector<std::size_t> throw_balls(std::size_t d, std::size_t m, std::optional<std::span<const double>> p,
                                     std::uint64_t seed);

std::size_t bins_with_load_at_least(std::span<const std::size_t> loads, std::size_t t);

/// m * Pr[Binomial(d, 1/m) >= t].
double expected_bins_with_load_at_least(std::size_t d, std::size_t m, std::size_t t);

/// Groups balls by bin and cuts each bin into floor(load / t) groups of t.
GroupSet group_balls(std::span<const std::size_t> ball_bins, std::size_t t);

/// m equiprobable virtual bins, each mixing at most two real bins.
class VirtualBinTable {
 public:
  struct Part {
    std::size_t bin;
    double mass;
  };

  struct VirtualBin {
    std::array<Part, 2> parts{};
    std::size_t count = 0;

    std::span<const Part> active() const { return {parts.data(), count}; }
    double mass() const;
  };

  std::size_t size() const noexcept { return bins_.size(); }
  const VirtualBin& operator[](std::size_t i) const { return bins_[i]; }
  std::span<const VirtualBin> bins() const noexcept { return bins_; }

  /// Total mass the table attributes to real bin i.
  std::vector<double> attributed_masses() const;

  /// Two-level draw: virtual bin uniform, then a real bin by conditional mass.
  /// Returns (virtual bin, real bin).
  std::pair<std::size_t, std::size_t> sample(Rng& rng) const;

 private:
  friend VirtualBinTable alias_virtual_bins(std::span<const double> p);
  std::vector<VirtualBin> bins_;
};

/// The alias-style construction: at each of m steps take the smallest remaining
/// mass p_j and the largest p_k, form a virtual bin from p_j and 1/m - p_j of
/// p_k, drop p_j and set p_k <- p_k + p_j - 1/m. Zero-mass parts are omitted.
/// Remaining masses are tracked with compensated arithmetic; a remaining mass
/// below -1e-12 raises NumericError.
VirtualBinTable alias_virtual_bins(std::span<const double> p);

struct VirtualGroupExtraction {
  std::vector<std::size_t> ball_virtual_bins;
  std::vector<std::size_t> ball_real_bins;
  std::size_t virtual_groups = 0;  // groups of t within virtual bins
  GroupSet groups;                 // real-bin groups of size >= ceil(t / 2), labelled by real bin
};

/// Throws d balls through the table, cuts each virtual bin's balls into groups
/// of t, splits every group by real bin and keeps parts of size >= ceil(t/2).
VirtualGroupExtraction virtual_group_extraction(std::size_t d, std::span<const double> p, std::size_t t,
                                                std::uint64_t seed);

}  // namespace ose
