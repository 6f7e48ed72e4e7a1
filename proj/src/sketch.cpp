#include "ose/sketch.hpp"

#include "ose/errors.hpp"
#include "ose/parallel.hpp"
#include "ose/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

namespace ose {

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::kGaussian: return "gaussian";
    case SketchKind::kSparse: return "sparse";
    case SketchKind::kIdentity: return "identity";
  }
  return "unknown";
}

void SketchSpec::validate() const {
  if (m < 1 || m > n) {
    throw SpecError("sketch spec needs 1 <= m <= n (m=" + std::to_string(m) +
                    ", n=" + std::to_string(n) + ")");
  }
  if (kind == SketchKind::kSparse && (s < 1 || s > m)) {
    throw SpecError("sparse sketch needs 1 <= s <= m (s=" + std::to_string(s) +
                    ", m=" + std::to_string(m) + ")");
  }
  if (kind == SketchKind::kIdentity && m != n) throw SpecError("identity sketch needs m == n");
  if (m > std::numeric_limits<std::uint32_t>::max()) throw SpecError("m exceeds 32-bit row index");
}

const DenseMatrix& SketchMatrix::dense() const {
  if (spec_.kind != SketchKind::kGaussian) throw InputError("dense(): sketch is not Gaussian");
  return dense_;
}

std::span<const std::uint32_t> SketchMatrix::column_rows(std::size_t j) const {
  if (spec_.kind != SketchKind::kSparse) throw InputError("column_rows(): sketch is not sparse");
  if (j >= spec_.n) throw ShapeError("column index out of range");
  return std::span<const std::uint32_t>(rows_).subspan(j * spec_.s, spec_.s);
}

std::span<const double> SketchMatrix::column_values(std::size_t j) const {
  if (spec_.kind != SketchKind::kSparse) throw InputError("column_values(): sketch is not sparse");
  if (j >= spec_.n) throw ShapeError("column index out of range");
  return std::span<const double>(values_).subspan(j * spec_.s, spec_.s);
}

DenseMatrix SketchMatrix::to_dense() const {
  const auto m = static_cast<Eigen::Index>(spec_.m);
  const auto n = static_cast<Eigen::Index>(spec_.n);
  switch (spec_.kind) {
    case SketchKind::kGaussian: return dense_;
    case SketchKind::kIdentity: return DenseMatrix::Identity(m, n);
    case SketchKind::kSparse: {
      DenseMatrix out = DenseMatrix::Zero(m, n);
      for (std::size_t j = 0; j < spec_.n; ++j) {
        const auto r = column_rows(j);
        const auto v = column_values(j);
        for (std::size_t k = 0; k < spec_.s; ++k) out(r[k], static_cast<Eigen::Index>(j)) = v[k];
      }
      return out;
    }
  }
  return {};
}

namespace {

// Floyd's sampling of s distinct values from [0, m), returned ascending.
void sample_distinct_rows(Rng& rng, std::size_t m, std::size_t s, std::uint32_t* out) {
  if (s <= 64) {
    std::size_t count = 0;
    for (std::size_t j = m - s; j < m; ++j) {
      auto t = static_cast<std::uint32_t>(rng.below(j + 1));
      if (std::find(out, out + count, t) != out + count) t = static_cast<std::uint32_t>(j);
      out[count++] = t;
    }
  } else {
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(s * 2);
    std::size_t count = 0;
    for (std::size_t j = m - s; j < m; ++j) {
      auto t = static_cast<std::uint32_t>(rng.below(j + 1));
      if (!chosen.insert(t).second) {
        t = static_cast<std::uint32_t>(j);
        chosen.insert(t);
      }
      out[count++] = t;
    }
  }
  std::sort(out, out + s);
}

void fill_sparse_column(const SketchSpec& spec, std::size_t j, std::uint32_t* rows, double* values) {
  Rng rng(derive_seed(spec.seed, j));
  sample_distinct_rows(rng, spec.m, spec.s, rows);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.s));
  for (std::size_t k = 0; k < spec.s; ++k) values[k] = (rng() >> 63) ? -scale : scale;
}

void fill_gaussian_column(const SketchSpec& spec, std::size_t j, double* out) {
  Rng rng(derive_seed(spec.seed, j));
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(spec.m)));
  for (std::size_t i = 0; i < spec.m; ++i) out[i] = normal(rng);
}

void require_kind(const SketchSpec& spec, SketchKind kind) {
  if (spec.kind != kind) {
    throw SpecError("expected a " + to_string(kind) + " spec, got " + to_string(spec.kind));
  }
}

}  // namespace

SketchMatrix sample_gaussian_sketch(const SketchSpec& spec, unsigned threads) {
  require_kind(spec, SketchKind::kGaussian);
  spec.validate();
  SketchMatrix out(spec);
  const auto m = static_cast<Eigen::Index>(spec.m);
  out.dense_.resize(m, static_cast<Eigen::Index>(spec.n));
  parallel_for(spec.n, threads, [&](std::size_t j) {
    fill_gaussian_column(spec, j, out.dense_.col(static_cast<Eigen::Index>(j)).data());
  });
  return out;
}

SketchMatrix sample_sparse_sketch(const SketchSpec& spec, unsigned threads) {
  require_kind(spec, SketchKind::kSparse);
  spec.validate();
  SketchMatrix out(spec);
  out.rows_.resize(spec.n * spec.s);
  out.values_.resize(spec.n * spec.s);
  parallel_for(spec.n, threads, [&](std::size_t j) {
    fill_sparse_column(spec, j, out.rows_.data() + j * spec.s, out.values_.data() + j * spec.s);
  });
  return out;
}

SketchMatrix identity_sketch(std::size_t n) {
  SketchSpec spec{n, n, SketchKind::kIdentity, 0, 0};
  spec.validate();
  return SketchMatrix(spec);
}

SparseColumn sparse_sketch_column(const SketchSpec& spec, std::size_t j) {
  require_kind(spec, SketchKind::kSparse);
  spec.validate();
  if (j >= spec.n) throw ShapeError("column index out of range");
  SparseColumn col;
  col.rows.resize(spec.s);
  col.values.resize(spec.s);
  fill_sparse_column(spec, j, col.rows.data(), col.values.data());
  return col;
}

DenseMatrix apply_sketch(const SketchMatrix& sketch, const DenseMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) != sketch.cols()) {
    throw ShapeError("apply_sketch: sketch has " + std::to_string(sketch.cols()) +
                     " columns but operand has " + std::to_string(a.rows()) + " rows");
  }
  switch (sketch.kind()) {
    case SketchKind::kIdentity: return a;
    case SketchKind::kGaussian: return sketch.dense() * a;
    case SketchKind::kSparse: {
      using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
      const RowMajor src = a;
      RowMajor out = RowMajor::Zero(static_cast<Eigen::Index>(sketch.rows()), a.cols());
      for (std::size_t j = 0; j < sketch.cols(); ++j) {
        const auto row = src.row(static_cast<Eigen::Index>(j));
        if (row.isZero(0.0)) continue;
        const auto r = sketch.column_rows(j);
        const auto v = sketch.column_values(j);
        for (std::size_t k = 0; k < r.size(); ++k) out.row(r[k]) += v[k] * row;
      }
      return out;
    }
  }
  return {};
}

DenseMatrix sketch_columns(const SketchMatrix& sketch, std::span<const std::size_t> columns) {
  const auto m = static_cast<Eigen::Index>(sketch.rows());
  DenseMatrix out = DenseMatrix::Zero(m, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::size_t j = columns[c];
    if (j >= sketch.cols()) throw ShapeError("sketch_columns: column index out of range");
    const auto col = static_cast<Eigen::Index>(c);
    switch (sketch.kind()) {
      case SketchKind::kIdentity: out(static_cast<Eigen::Index>(j), col) = 1.0; break;
      case SketchKind::kGaussian: out.col(col) = sketch.dense().col(static_cast<Eigen::Index>(j)); break;
      case SketchKind::kSparse: {
        const auto r = sketch.column_rows(j);
        const auto v = sketch.column_values(j);
        for (std::size_t k = 0; k < r.size(); ++k) out(r[k], col) = v[k];
        break;
      }
    }
  }
  return out;
}

DenseMatrix sample_sketch_columns(const SketchSpec& spec, std::span<const std::size_t> columns) {
  spec.validate();
  const auto m = static_cast<Eigen::Index>(spec.m);
  DenseMatrix out = DenseMatrix::Zero(m, static_cast<Eigen::Index>(columns.size()));
  std::vector<std::uint32_t> rows(spec.s);
  std::vector<double> values(spec.s);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::size_t j = columns[c];
    if (j >= spec.n) throw ShapeError("sample_sketch_columns: column index out of range");
    const auto col = static_cast<Eigen::Index>(c);
    switch (spec.kind) {
      case SketchKind::kIdentity: out(static_cast<Eigen::Index>(j), col) = 1.0; break;
      case SketchKind::kGaussian: fill_gaussian_column(spec, j, out.col(col).data()); break;
      case SketchKind::kSparse:
        fill_sparse_column(spec, j, rows.data(), values.data());
        for (std::size_t k = 0; k < spec.s; ++k) out(rows[k], col) = values[k];
        break;
    }
  }
  return out;
}

namespace {

DenseMatrix gaussian_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  DenseMatrix g(rows, cols);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(rows));
  for (Eigen::Index j = 0; j < cols; ++j) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    std::normal_distribution<double> normal(0.0, stddev);
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  }
  return g;
}

}  // namespace

DenseMatrix gaussian_sketch_image(const DenseMatrix& m_matrix, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw SpecError("gaussian_sketch_image: m must be positive");
  if (m_matrix.rows() < m_matrix.cols() || m_matrix.cols() == 0) {
    throw ShapeError("gaussian_sketch_image: operand must be n x k with 1 <= k <= n");
  }
  if (!m_matrix.allFinite()) throw InputError("gaussian_sketch_image: non-finite entries");
  Eigen::HouseholderQR<DenseMatrix> qr(m_matrix);
  const Eigen::Index k = m_matrix.cols();
  const DenseMatrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  return gaussian_block(static_cast<Eigen::Index>(m), k, seed) * r;
}

DenseMatrix gaussian_sketched_orthonormal(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (m < 1 || d < 1) throw SpecError("gaussian_sketched_orthonormal: m and d must be positive");
  return gaussian_block(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d), seed);
}

}  // namespace ose
