#include "ose/linalg.hpp"

#include "ose/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ose {

SingularSpectrum::SingularSpectrum(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw InputError("singular value " + std::to_string(i) + " is negative or not finite");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw InputError("singular values must be sorted descending");
    }
  }
}

double SingularSpectrum::largest() const {
  if (values_.empty()) throw InputError("empty spectrum");
  return values_.front();
}

double SingularSpectrum::smallest() const {
  if (values_.empty()) throw InputError("empty spectrum");
  return values_.back();
}

SingularSpectrum singular_values(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw InputError("singular_values: empty matrix");
  if (!a.allFinite()) throw InputError("singular_values: matrix has non-finite entries");

  Eigen::VectorXd sv;
  if (a.rows() > 2 * a.cols()) {
    // Tall: reduce to the square triangular factor first.
    Eigen::HouseholderQR<DenseMatrix> qr(a);
    const DenseMatrix r =
        qr.matrixQR().topRows(a.cols()).template triangularView<Eigen::Upper>();
    sv = Eigen::JacobiSVD<DenseMatrix>(r).singularValues();
  } else if (a.cols() > 2 * a.rows()) {
    Eigen::HouseholderQR<DenseMatrix> qr(a.transpose());
    const DenseMatrix r =
        qr.matrixQR().topRows(a.rows()).template triangularView<Eigen::Upper>();
    sv = Eigen::JacobiSVD<DenseMatrix>(r).singularValues();
  } else {
    sv = Eigen::JacobiSVD<DenseMatrix>(a).singularValues();
  }
  std::vector<double> values(sv.data(), sv.data() + sv.size());
  // Jacobi output is sorted; clamp the sign of exact zeros.
  for (auto& v : values) v = std::abs(v);
  return SingularSpectrum(std::move(values));
}

double condition_number(const SingularSpectrum& spectrum) {
  if (spectrum.empty()) throw InputError("condition_number: empty spectrum");
  const double top = spectrum.largest();
  const double bottom = spectrum.smallest();
  if (top == 0.0 || bottom < tolerance::kRankCutoff * top) {
    return std::numeric_limits<double>::infinity();
  }
  return top / bottom;
}

double orthogonality_error(const DenseMatrix& q) {
  const DenseMatrix gram = q.transpose() * q;
  return (gram - DenseMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

OrthonormalBasis::OrthonormalBasis(DenseMatrix matrix, double tol)
    : matrix_(std::move(matrix)), tol_(tol) {
  if (matrix_.cols() == 0 || matrix_.rows() < matrix_.cols()) {
    throw ShapeError("orthonormal basis must be n x d with 1 <= d <= n");
  }
  if (!matrix_.allFinite()) throw InputError("orthonormal basis has non-finite entries");
  const double err = orthogonality_error(matrix_);
  if (err > tol_) {
    throw NumericError("columns are not orthonormal: |Q^T Q - I|_max = " + std::to_string(err));
  }
}

OrthonormalBasis gram_schmidt(const DenseMatrix& v) {
  const Eigen::Index n = v.rows();
  const Eigen::Index d = v.cols();
  if (d == 0 || n < d) throw ShapeError("gram_schmidt: need an n x d matrix with 1 <= d <= n");
  if (!v.allFinite()) throw InputError("gram_schmidt: non-finite entries");

  const double scale = v.colwise().norm().maxCoeff();
  if (scale == 0.0) throw DegeneracyError("gram_schmidt: all columns are zero");

  DenseMatrix q(n, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector w = v.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        w -= q.col(j).dot(w) * q.col(j);
      }
    }
    const double norm = w.norm();
    if (norm <= 1e-8 * scale) {
      throw DegeneracyError("gram_schmidt: column " + std::to_string(k) +
                            " is numerically dependent on earlier columns");
    }
    q.col(k) = w / norm;
  }
  return OrthonormalBasis(std::move(q));
}

Vector project_onto(const OrthonormalBasis& basis, const Eigen::Ref<const Vector>& x) {
  if (x.size() != basis.rows()) {
    throw ShapeError("project_onto: vector length " + std::to_string(x.size()) +
                     " does not match basis rows " + std::to_string(basis.rows()));
  }
  const Vector coeffs = basis.matrix().transpose() * x;
  return basis.matrix() * coeffs;
}

InterlacingResult interlacing_check(const DenseMatrix& a, const Eigen::Ref<const Vector>& new_row) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  if (n == 0 || n + 1 > m) throw ShapeError("interlacing_check: need n + 1 <= m");
  if (new_row.size() != m) throw ShapeError("interlacing_check: new row has wrong length");

  DenseMatrix extended(n + 1, m);
  extended.topRows(n) = a;
  extended.row(n) = new_row.transpose();

  SingularSpectrum sigma = singular_values(a);
  SingularSpectrum beta = singular_values(extended);

  const double slack = tolerance::kRelative * beta.largest();
  bool ok = true;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > beta[i] + slack) ok = false;
    if (beta[i + 1] > sigma[i] + slack) ok = false;
  }
  return InterlacingResult{ok, std::move(sigma), std::move(beta)};
}

}  // namespace ose
