#pragma once

#include "ose/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ose {

enum class SketchKind { kGaussian, kSparse, kIdentity };

std::string to_string(SketchKind kind);

/// Shape and law of a sketching matrix Pi in R^{m x n}.
struct SketchSpec {
  std::size_t n = 1;
  std::size_t m = 1;
  SketchKind kind = SketchKind::kGaussian;
  std::size_t s = 0;  // nonzeros per column, sparse only
  std::uint64_t seed = 0;

  /// Throws SpecError unless 1 <= m <= n, 1 <= s <= m (sparse) and m == n (identity).
  void validate() const;
};

/// One column of a sparse sketch: distinct ascending rows with values +-1/sqrt(s).
struct SparseColumn {
  std::vector<std::uint32_t> rows;
  std::vector<double> values;
};

/// A sampled sketch. Gaussian sketches hold a dense m x n payload; sparse sketches
/// hold exactly s (row, value) pairs per column in compressed-column layout;
/// the identity sketch holds nothing.
class SketchMatrix {
 public:
  const SketchSpec& spec() const noexcept { return spec_; }
  std::size_t rows() const noexcept { return spec_.m; }
  std::size_t cols() const noexcept { return spec_.n; }
  SketchKind kind() const noexcept { return spec_.kind; }

  /// Gaussian payload. Throws for other kinds.
  const DenseMatrix& dense() const;

  /// Sparse column j. Throws for other kinds.
  std::span<const std::uint32_t> column_rows(std::size_t j) const;
  std::span<const double> column_values(std::size_t j) const;

  DenseMatrix to_dense() const;

 private:
  friend SketchMatrix sample_gaussian_sketch(const SketchSpec&, unsigned);
  friend SketchMatrix sample_sparse_sketch(const SketchSpec&, unsigned);
  friend SketchMatrix identity_sketch(std::size_t);

  explicit SketchMatrix(SketchSpec spec) : spec_(spec) {}

  SketchSpec spec_;
  DenseMatrix dense_;
  std::vector<std::uint32_t> rows_;  // n * s, column j at [j*s, (j+1)*s)
  std::vector<double> values_;
};

/// I.i.d. N(0, 1/m) entries; column j is drawn from the stream derive_seed(seed, j).
SketchMatrix sample_gaussian_sketch(const SketchSpec& spec, unsigned threads = 1);

/// Per column: s distinct rows uniform without replacement and independent
/// Rademacher signs scaled by 1/sqrt(s). Column j uses stream derive_seed(seed, j).
SketchMatrix sample_sparse_sketch(const SketchSpec& spec, unsigned threads = 1);

SketchMatrix identity_sketch(std::size_t n);

/// Column j of the sparse sketch described by spec, without materializing the
/// rest. Bit-identical to column j of sample_sparse_sketch(spec).
SparseColumn sparse_sketch_column(const SketchSpec& spec, std::size_t j);

/// Pi A. Sparse sketches touch only the s nonzeros of each column.
DenseMatrix apply_sketch(const SketchMatrix& sketch, const DenseMatrix& a);

/// The m x k matrix of the listed columns of Pi, i.e. Pi applied to the
/// standard basis vectors e_{columns[i]}.
DenseMatrix sketch_columns(const SketchMatrix& sketch, std::span<const std::size_t> columns);

/// Same as sketch_columns(<sketch sampled from spec>, columns) for any kind,
/// generating only the requested columns from their per-column streams.
DenseMatrix sample_sketch_columns(const SketchSpec& spec, std::span<const std::size_t> columns);

/// A draw distributed exactly as Pi M for a Gaussian Pi with m rows and
/// N(0, 1/m) entries, for any n. Uses rotation invariance of the Gaussian law:
/// with M = QR, Pi Q has i.i.d. N(0, 1/m) entries, so only an m x k Gaussian is
/// sampled. Cost is independent of n beyond the QR of M.
DenseMatrix gaussian_sketch_image(const DenseMatrix& m_matrix, std::size_t m, std::uint64_t seed);

/// Pi U for an orthonormal n x d U under the same law: an m x d matrix of
/// i.i.d. N(0, 1/m) entries, whatever U and n are.
DenseMatrix gaussian_sketched_orthonormal(std::size_t m, std::size_t d, std::uint64_t seed);

}  // namespace ose
