#include "ose/errors.hpp"
#include "ose/random.hpp"
#include "ose/sketch.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace ose;

TEST(SketchSpec, Validation) {
  EXPECT_THROW((SketchSpec{10, 0, SketchKind::kGaussian, 0, 1}.validate()), SpecError);
  EXPECT_THROW((SketchSpec{10, 11, SketchKind::kGaussian, 0, 1}.validate()), SpecError);
  EXPECT_THROW((SketchSpec{10, 4, SketchKind::kSparse, 5, 1}.validate()), SpecError);
  EXPECT_THROW((SketchSpec{10, 4, SketchKind::kSparse, 0, 1}.validate()), SpecError);
  EXPECT_THROW((SketchSpec{10, 4, SketchKind::kIdentity, 0, 1}.validate()), SpecError);
  EXPECT_NO_THROW((SketchSpec{10, 4, SketchKind::kSparse, 4, 1}.validate()));
}

TEST(SparseSketch, ExactlySDistinctRowsWithScaledSigns) {
  const SketchSpec spec{500, 30, SketchKind::kSparse, 4, 77};
  const auto sketch = sample_sparse_sketch(spec);
  const double scale = 1.0 / std::sqrt(4.0);
  for (std::size_t j = 0; j < spec.n; ++j) {
    const auto rows = sketch.column_rows(j);
    const auto values = sketch.column_values(j);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(std::set<std::uint32_t>(rows.begin(), rows.end()).size(), 4u);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_LT(rows[k], spec.m);
      EXPECT_DOUBLE_EQ(std::abs(values[k]), scale);
      norm2 += values[k] * values[k];
    }
    EXPECT_NEAR(norm2, 1.0, 1e-15);
  }
}

TEST(SparseSketch, RowAndSignFrequenciesAreUniform) {
  const SketchSpec spec{20000, 10, SketchKind::kSparse, 2, 5};
  const auto sketch = sample_sparse_sketch(spec);
  std::vector<double> hits(spec.m, 0.0);
  double positive = 0.0;
  for (std::size_t j = 0; j < spec.n; ++j) {
    for (auto r : sketch.column_rows(j)) hits[r] += 1.0;
    for (auto v : sketch.column_values(j)) positive += v > 0 ? 1.0 : 0.0;
  }
  // Each row is hit with probability s/m = 0.2 per column.
  const double expected = 0.2 * spec.n, sd = std::sqrt(spec.n * 0.2 * 0.8);
  for (double h : hits) EXPECT_LT(std::abs(h - expected), 5 * sd);
  const double total = 2.0 * spec.n;
  EXPECT_LT(std::abs(positive - total / 2), 5 * std::sqrt(total / 4));
}

TEST(SparseSketch, LazyColumnsAreBitIdentical) {
  const SketchSpec spec{300, 17, SketchKind::kSparse, 3, 99};
  const auto sketch = sample_sparse_sketch(spec, 4);
  for (std::size_t j : {0u, 1u, 150u, 299u}) {
    const auto col = sparse_sketch_column(spec, j);
    const auto rows = sketch.column_rows(j);
    const auto values = sketch.column_values(j);
    ASSERT_EQ(col.rows.size(), rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      EXPECT_EQ(col.rows[k], rows[k]);
      EXPECT_EQ(col.values[k], values[k]);
    }
  }
  const std::vector<std::size_t> cols{5, 200, 7};
  EXPECT_EQ(sample_sketch_columns(spec, cols), sketch_columns(sketch, cols));
}

TEST(GaussianSketch, LazyColumnsAndThreadCountDoNotChangeEntries) {
  const SketchSpec spec{120, 9, SketchKind::kGaussian, 0, 3};
  const auto one = sample_gaussian_sketch(spec, 1);
  const auto four = sample_gaussian_sketch(spec, 4);
  EXPECT_EQ(one.dense(), four.dense());
  const std::vector<std::size_t> cols{0, 119, 64};
  EXPECT_EQ(sample_sketch_columns(spec, cols), sketch_columns(one, cols));
}

TEST(GaussianSketch, EntryMomentsMatchVarianceOneOverM) {
  const SketchSpec spec{4000, 25, SketchKind::kGaussian, 0, 11};
  const DenseMatrix g = sample_gaussian_sketch(spec).dense();
  const double count = static_cast<double>(g.size());
  const double mean = g.mean();
  const double var = (g.array() - mean).square().sum() / (count - 1);
  EXPECT_LT(std::abs(mean), 5 * std::sqrt(1.0 / 25 / count));
  // Var of the sample variance is about 2 sigma^4 / N.
  EXPECT_LT(std::abs(var - 1.0 / 25), 5 * std::sqrt(2.0 / count) / 25);
}

TEST(ApplySketch, MatchesNaiveProductForEveryKind) {
  const auto a = oracle::gaussian(80, 5, 21);
  const SketchMatrix sketches[] = {
      sample_gaussian_sketch({80, 12, SketchKind::kGaussian, 0, 1}),
      sample_sparse_sketch({80, 12, SketchKind::kSparse, 3, 2}),
      sample_sparse_sketch({80, 12, SketchKind::kSparse, 1, 2}),
      identity_sketch(80),
  };
  for (const auto& s : sketches) {
    const auto want = oracle::naive_product(s.to_dense(), a);
    EXPECT_LE((apply_sketch(s, a) - want).cwiseAbs().maxCoeff(), 1e-12) << to_string(s.kind());
  }
  EXPECT_THROW(apply_sketch(identity_sketch(5), a), Error);
}

TEST(SketchColumns, EqualsSketchTimesBasisVectors) {
  const auto s = sample_sparse_sketch({50, 8, SketchKind::kSparse, 2, 4});
  const std::vector<std::size_t> cols{3, 49, 0};
  DenseMatrix e = DenseMatrix::Zero(50, 3);
  for (std::size_t i = 0; i < cols.size(); ++i) e(static_cast<Eigen::Index>(cols[i]), static_cast<Eigen::Index>(i)) = 1;
  EXPECT_EQ(sketch_columns(s, cols), apply_sketch(s, e));
}

TEST(GaussianImage, GramMatrixMatchesExplicitSketchInDistribution) {
  // E[(Pi M)^T (Pi M)] = M^T M for either construction; compare Monte Carlo means.
  const auto m_matrix = oracle::gaussian(60, 3, 8);
  const DenseMatrix target = m_matrix.transpose() * m_matrix;
  DenseMatrix lazy = DenseMatrix::Zero(3, 3), explicit_sum = DenseMatrix::Zero(3, 3);
  constexpr int reps = 600;
  for (int r = 0; r < reps; ++r) {
    const auto img = gaussian_sketch_image(m_matrix, 10, derive_seed(1, r));
    lazy += img.transpose() * img;
    const auto pi = sample_gaussian_sketch({60, 10, SketchKind::kGaussian, 0, derive_seed(2, r)});
    const DenseMatrix pm = apply_sketch(pi, m_matrix);
    explicit_sum += pm.transpose() * pm;
  }
  lazy /= reps;
  explicit_sum /= reps;
  // Entries of the Gram estimate fluctuate at roughly |M|^2 sqrt(2 / (m reps)).
  const double slack = 5 * target.diagonal().maxCoeff() * std::sqrt(2.0 / (10.0 * reps));
  EXPECT_LE((lazy - target).cwiseAbs().maxCoeff(), slack);
  EXPECT_LE((explicit_sum - target).cwiseAbs().maxCoeff(), slack);
}

TEST(DeriveSeed, DistinctChildrenAndStableValues) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 0), derive_seed(42, 0));
  EXPECT_NE(derive_seed(42, 1), derive_seed(43, 1));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}
