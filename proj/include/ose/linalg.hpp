#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace ose {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tolerance {
/// Relative slack for comparisons between independently computed spectra.
inline constexpr double kRelative = 1e-8;
/// Max-norm bound on Q^T Q - I for an orthonormal basis.
inline constexpr double kOrthogonality = 1e-10;
/// Bound on |P(Px) - Px| for projections.
inline constexpr double kIdempotence = 1e-12;
/// Singular values below kRankCutoff * sigma_max count as zero.
inline constexpr double kRankCutoff = 1e-10;
}  // namespace tolerance

/// Singular values sorted descending. Construction validates ordering and sign.
class SingularSpectrum {
 public:
  explicit SingularSpectrum(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double largest() const;
  double smallest() const;

 private:
  std::vector<double> values_;
};

/// All min(rows, cols) singular values of A, descending.
/// Throws InputError on empty or non-finite input.
SingularSpectrum singular_values(const DenseMatrix& a);

/// sigma_max / sigma_min. Returns +infinity when sigma_min falls under the
/// rank cutoff relative to sigma_max (including the all-zero spectrum).
double condition_number(const SingularSpectrum& spectrum);

/// An n x d matrix with orthonormal columns.
class OrthonormalBasis {
 public:
  /// Validates |Q^T Q - I|_max <= tol; throws NumericError otherwise.
  explicit OrthonormalBasis(DenseMatrix matrix, double tol = tolerance::kOrthogonality);

  const DenseMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index rows() const noexcept { return matrix_.rows(); }
  Eigen::Index cols() const noexcept { return matrix_.cols(); }
  double orthogonality_tolerance() const noexcept { return tol_; }

 private:
  DenseMatrix matrix_;
  double tol_;
};

/// Max-norm of Q^T Q - I.
double orthogonality_error(const DenseMatrix& q);

/// Modified Gram-Schmidt with one full reorthogonalization pass.
/// The first output column is the first input column normalized and the
/// span of every leading block of columns is preserved.
/// Throws DegeneracyError when a column is dependent on its predecessors to
/// within 1e-8 of the largest column norm.
OrthonormalBasis gram_schmidt(const DenseMatrix& v);

/// B (B^T x).
Vector project_onto(const OrthonormalBasis& basis, const Eigen::Ref<const Vector>& x);

struct InterlacingResult {
  bool interlaces;
  SingularSpectrum original;  // n values of A
  SingularSpectrum extended;  // n + 1 values of A with new_row appended
};

/// Appends new_row to the n x m matrix A (requires n + 1 <= m) and checks
/// beta_1 >= sigma_1 >= beta_2 >= ... >= sigma_n >= beta_{n+1} in descending
/// order, with slack kRelative * beta_1.
InterlacingResult interlacing_check(const DenseMatrix& a, const Eigen::Ref<const Vector>& new_row);

}  // namespace ose
